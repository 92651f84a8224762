//! Separators with bounded edge cover.
//!
//! Terminal cuts are found by exact bounded search. Balanced separators are
//! reduced to terminal cuts: the set `S` is split into parts, each part is
//! contracted into a fresh terminal, the remaining vertices of `S` are tied
//! to every terminal by apex edges (forcing them into any cut), and a cut
//! of bounded cover between the terminals is searched for. Certificates
//! found in the contracted hypergraph are mapped back through edge
//! preimages.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::cover::{
    cover_number, edge_cover_number, fractional_cover_number, Certificate, CoverCertificate,
    CoverMeasure, FractionalWeights,
};
use crate::error::{domain, internal, Result};
use crate::hypergraph::{ContractionSpec, Contracted, Hypergraph, Preimage};
use crate::ratlp::{integer, Rational};
use crate::vertex_set::VertexSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatorResult {
    pub separator: VertexSet,
    pub certificate: Certificate,
}

/// Vertex adjacency (sharing an edge), indexed by universe index.
struct Adjacency {
    neighbors: Vec<VertexSet>,
}

impl Adjacency {
    fn new(h: &Hypergraph) -> Self {
        let size = h.vertices().iter().last().map_or(0, |v| v + 1);
        let mut neighbors = vec![VertexSet::new(); size];
        for e in h.edges() {
            for v in e.vertices.iter() {
                neighbors[v].union_with(&e.vertices);
            }
        }
        for (v, n) in neighbors.iter_mut().enumerate() {
            n.remove(v);
        }
        Self { neighbors }
    }

    /// Shortest path from `from` to any vertex of `to` avoiding `blocked`.
    fn path(&self, from: usize, to: &VertexSet, blocked: &VertexSet) -> Option<Vec<usize>> {
        let mut parent: HashMap<usize, usize> = HashMap::from([(from, from)]);
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if to.contains(v) {
                let mut path = vec![v];
                let mut cur = v;
                while cur != from {
                    cur = parent[&cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for w in self.neighbors[v].iter() {
                if !blocked.contains(w) && !parent.contains_key(&w) {
                    parent.insert(w, v);
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// First terminal-to-terminal path in pair order, if any survives.
    fn terminal_path(&self, terminals: &[usize], blocked: &VertexSet) -> Option<Vec<usize>> {
        for i in 0..terminals.len() {
            let others: VertexSet = terminals[i + 1..].iter().copied().collect();
            if others.is_empty() {
                break;
            }
            if let Some(p) = self.path(terminals[i], &others, blocked) {
                return Some(p);
            }
        }
        None
    }

    fn separates(&self, terminals: &[usize], blocked: &VertexSet) -> bool {
        self.terminal_path(terminals, blocked).is_none()
    }

    /// Drops vertices of `cut` in ascending order while it still separates.
    fn minimalize(&self, terminals: &[usize], cut: &VertexSet) -> VertexSet {
        let mut x = cut.clone();
        for v in cut.iter() {
            x.remove(v);
            if !self.separates(terminals, &x) {
                x.insert(v);
            }
        }
        x
    }
}

fn check_terminals(h: &Hypergraph, terminals: &[usize]) -> Result<()> {
    let distinct: HashSet<usize> = terminals.iter().copied().collect();
    if distinct.len() != terminals.len() {
        return domain("terminals must be distinct");
    }
    for &t in terminals {
        if !h.vertices().contains(t) {
            return domain(format!("terminal {t} is not a vertex"));
        }
    }
    Ok(())
}

/// An `s,t`-separator `X ⊆ V(H) ∖ {s,t}` with `ρ(X) ≤ k`, if one exists.
///
/// Such a separator exists iff some `≤ k` edges have a union that, minus
/// the terminals, separates `s` from `t`. The search repeatedly takes a
/// shortest surviving `s`–`t` path and branches over the edges meeting its
/// interior. The returned separator is inclusion-minimal.
pub fn st_separator_with_cover(h: &Hypergraph, s: usize, t: usize, k: usize) -> Result<Option<SeparatorResult>> {
    if s == t {
        return domain("s and t must differ");
    }
    check_terminals(h, &[s, t])?;
    let adj = Adjacency::new(h);
    let terminals = [s, t];
    let ends: VertexSet = terminals.iter().copied().collect();
    let contributions: Vec<VertexSet> = h.edges().iter().map(|e| e.vertices.difference(&ends)).collect();

    fn search(
        adj: &Adjacency,
        terminals: &[usize; 2],
        contributions: &[VertexSet],
        removed: VertexSet,
        budget: usize,
        visited: &mut HashSet<(VertexSet, usize)>,
    ) -> Option<VertexSet> {
        let Some(path) = adj.terminal_path(terminals, &removed) else {
            return Some(removed);
        };
        if budget == 0 || path.len() <= 2 {
            return None;
        }
        let interior: VertexSet = path[1..path.len() - 1].iter().copied().collect();
        let mut branches: Vec<VertexSet> = Vec::new();
        for c in contributions {
            if !c.intersects(&interior) {
                continue;
            }
            let gain = c.difference(&removed);
            if branches.iter().any(|b| gain.is_subset(b)) {
                continue;
            }
            branches.retain(|b| !b.is_subset(&gain));
            branches.push(gain);
        }
        for gain in branches {
            let next = removed.union(&gain);
            if !visited.insert((next.clone(), budget - 1)) {
                continue;
            }
            if let Some(found) = search(adj, terminals, contributions, next, budget - 1, visited) {
                return Some(found);
            }
        }
        None
    }

    let mut visited = HashSet::new();
    let Some(raw) = search(&adj, &terminals, &contributions, VertexSet::new(), k, &mut visited) else {
        return Ok(None);
    };
    let separator = adj.minimalize(&terminals, &raw);
    let (rho, cert) = edge_cover_number(h, &separator)?;
    if rho > k {
        return internal("separator cover exceeds the budget it was built from");
    }
    Ok(Some(SeparatorResult { separator, certificate: Certificate::Integral(cert) }))
}

/// A multiway cut for 2 or 3 terminals with `ρ*(X) ≤ k`, if one exists.
///
/// Only inclusion-minimal cuts are considered; since `ρ*(X) ≤ k` forces
/// `|X| ≤ k·r`, the search is bounded by that size. Each search node adds
/// one interior vertex of a surviving terminal path, and is pruned as soon
/// as its fractional cover exceeds `k` (cover numbers are monotone).
pub fn multiway_cut_with_fractional_cover(
    h: &Hypergraph,
    terminals: &[usize],
    k: &Rational,
) -> Result<Option<SeparatorResult>> {
    if !(2..=3).contains(&terminals.len()) {
        return domain(format!("multiway cuts take 2 or 3 terminals, got {}", terminals.len()));
    }
    check_terminals(h, terminals)?;
    if !k.is_positive() {
        return domain(format!("cover bound must be positive, got {k}"));
    }
    let adj = Adjacency::new(h);
    let max_size = (k * integer(h.rank() as i64)).floor().to_integer().to_usize().unwrap_or(usize::MAX);

    struct Ctx<'a> {
        h: &'a Hypergraph,
        adj: &'a Adjacency,
        terminals: &'a [usize],
        k: &'a Rational,
        max_size: usize,
        fits: HashMap<VertexSet, bool>,
        visited: HashSet<VertexSet>,
    }

    impl Ctx<'_> {
        fn fits(&mut self, x: &VertexSet) -> Result<bool> {
            if let Some(&b) = self.fits.get(x) {
                return Ok(b);
            }
            let b = CoverMeasure::Fractional.at_most(self.h, x, self.k)?;
            self.fits.insert(x.clone(), b);
            Ok(b)
        }

        fn search(&mut self, removed: VertexSet) -> Result<Option<VertexSet>> {
            let Some(path) = self.adj.terminal_path(self.terminals, &removed) else {
                return Ok(Some(self.adj.minimalize(self.terminals, &removed)));
            };
            if removed.len() >= self.max_size || path.len() <= 2 {
                return Ok(None);
            }
            for &v in &path[1..path.len() - 1] {
                let mut next = removed.clone();
                next.insert(v);
                if !self.visited.insert(next.clone()) || !self.fits(&next)? {
                    continue;
                }
                if let Some(found) = self.search(next)? {
                    return Ok(Some(found));
                }
            }
            Ok(None)
        }
    }

    let mut ctx = Ctx {
        h,
        adj: &adj,
        terminals,
        k,
        max_size,
        fits: HashMap::new(),
        visited: HashSet::new(),
    };
    let Some(separator) = ctx.search(VertexSet::new())? else {
        return Ok(None);
    };
    let (value, weights) = fractional_cover_number(h, &separator)?;
    if value > *k {
        return internal("minimal cut has a larger fractional cover than its superset");
    }
    Ok(Some(SeparatorResult { separator, certificate: Certificate::Fractional(weights) }))
}

/// Whether `x` is a balanced separator for `s`: `x` has cover at most
/// `bound`, and every component `V'` of `H ∖ x` has
/// `cover(V' ∩ s) < 2/3 · cover(s)`.
pub fn is_balanced_separator(
    h: &Hypergraph,
    s: &VertexSet,
    x: &VertexSet,
    bound: &Rational,
    measure: CoverMeasure,
) -> Result<bool> {
    h.require_subset(s, "balanced set")?;
    h.require_subset(x, "separator")?;
    if !measure.at_most(h, x, bound)? {
        return Ok(false);
    }
    let total = measure.value(h, s)?;
    let two_thirds = &total * integer(2);
    for comp in h.components_within(&h.vertices().difference(x)) {
        let part = measure.value(h, &comp.intersection(s))?;
        if part * integer(3) >= two_thirds {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Fresh terminal labels that name no vertex of `h`.
fn fresh_labels(h: &Hypergraph, q: usize) -> Vec<String> {
    (1..=q)
        .map(|i| {
            let mut l = format!("#s{i}");
            while h.index_of(&l).is_some() {
                l.push('\'');
            }
            l
        })
        .collect()
}

/// Subsets of `items` of size at most `max`, by size then lexicographically.
fn small_subsets(items: &[usize], max: usize) -> Vec<VertexSet> {
    let mut out = vec![VertexSet::new()];
    let mut frontier: Vec<(VertexSet, usize)> = vec![(VertexSet::new(), 0)];
    for _ in 0..max.min(items.len()) {
        let mut next = Vec::new();
        for (set, start) in &frontier {
            for (i, &v) in items.iter().enumerate().skip(*start) {
                let mut s = set.clone();
                s.insert(v);
                next.push((s, i + 1));
            }
        }
        out.extend(next.iter().map(|(s, _)| s.clone()));
        frontier = next;
    }
    out
}

/// Groups of `part` that no cut avoiding `part` can split: vertices sharing
/// an edge of `h` must land in the same contracted terminal.
fn inseparable_blocks(h: &Hypergraph, part: &VertexSet) -> Vec<VertexSet> {
    let mut blocks: Vec<VertexSet> = part.iter().map(VertexSet::singleton).collect();
    for e in h.edges() {
        let touched = e.vertices.intersection(part);
        if touched.len() < 2 {
            continue;
        }
        let (hit, mut rest): (Vec<VertexSet>, Vec<VertexSet>) =
            blocks.into_iter().partition(|b| b.intersects(&touched));
        rest.push(hit.into_iter().fold(VertexSet::new(), |acc, b| acc.union(&b)));
        blocks = rest;
    }
    blocks.sort();
    blocks
}

/// Set partitions of `blocks` into exactly `q` non-empty groups, in
/// restricted-growth-string order.
fn block_partitions(blocks: &[VertexSet], q: usize) -> Vec<Vec<VertexSet>> {
    fn rec(i: usize, labels: &mut Vec<usize>, used: usize, q: usize, blocks: &[VertexSet], out: &mut Vec<Vec<VertexSet>>) {
        if i == blocks.len() {
            if used == q {
                let mut groups = vec![VertexSet::new(); q];
                for (b, &l) in blocks.iter().zip(labels.iter()) {
                    groups[l].union_with(b);
                }
                out.push(groups);
            }
            return;
        }
        if used + (blocks.len() - i) < q {
            return;
        }
        for l in 0..=used.min(q - 1) {
            labels.push(l);
            rec(i + 1, labels, used.max(l + 1), q, blocks, out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, &mut Vec::new(), 0, q, blocks, &mut out);
    out
}

struct Candidates {
    /// Disjoint non-empty parts `S_1, ..., S_q` of `S`; the rest of `S`
    /// is forced into the separator.
    partitions: Vec<Vec<VertexSet>>,
}

/// Enumerates the part families tried by the balanced-separator reduction:
/// for every leftover `R ⊆ S` whose cover fits the budget, every split of
/// `S ∖ R` into `q` parts each below two thirds of `cover(S)`.
fn candidates(
    h: &Hypergraph,
    s: &VertexSet,
    total: &Rational,
    budget: &Rational,
    measure: CoverMeasure,
    part_counts: &[usize],
) -> Result<Candidates> {
    let mut memo: HashMap<VertexSet, Rational> = HashMap::new();
    let mut value = |set: &VertexSet| -> Result<Rational> {
        if let Some(v) = memo.get(set) {
            return Ok(v.clone());
        }
        let v = measure.value(h, set)?;
        memo.insert(set.clone(), v.clone());
        Ok(v)
    };
    let elems: Vec<usize> = s.iter().collect();
    let max_leftover = (budget * integer(h.rank() as i64)).floor().to_integer().to_usize().unwrap_or(elems.len());
    let two_thirds = total * integer(2);
    let mut partitions = Vec::new();
    for leftover in small_subsets(&elems, max_leftover) {
        if value(&leftover)? > *budget {
            continue;
        }
        let rest = s.difference(&leftover);
        let blocks = inseparable_blocks(h, &rest);
        for &q in part_counts {
            for groups in block_partitions(&blocks, q) {
                let mut ok = true;
                for g in &groups {
                    if value(g)? * integer(3) >= two_thirds {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    partitions.push(groups);
                }
            }
        }
    }
    Ok(Candidates { partitions })
}

fn apex_hypergraph(h: &Hypergraph, s: &VertexSet, parts: &[VertexSet]) -> Result<Contracted> {
    let labels = fresh_labels(h, parts.len());
    let spec = ContractionSpec::new(parts.iter().cloned().zip(labels).collect())?;
    h.contract_with_apex(s, &spec)
}

/// Origin edge standing in for an apex edge at `vertex`: the first edge of
/// `h` containing it.
fn apex_stand_in(h: &Hypergraph, vertex: usize) -> Result<&str> {
    match h.edges().iter().find(|e| e.vertices.contains(vertex)) {
        Some(e) => Ok(&e.label),
        None => internal("vertex in no edge"),
    }
}

/// Maps an integral cover certificate of the contracted hypergraph back to
/// edges of `h` with the same or smaller size.
pub fn translate_certificate(h: &Hypergraph, contracted: &Contracted, cert: &CoverCertificate) -> Result<CoverCertificate> {
    let mut labels: Vec<String> = Vec::new();
    for l in &cert.edges {
        let origin = match contracted.preimage(l) {
            Some(Preimage::Edge(o)) => o.to_string(),
            Some(Preimage::Apex { vertex, .. }) => apex_stand_in(h, vertex)?.to_string(),
            None => return internal(format!("certificate edge {l} is not in the contracted hypergraph")),
        };
        if !labels.contains(&origin) {
            labels.push(origin);
        }
    }
    labels.sort_by_key(|l| h.edge_index(l));
    Ok(CoverCertificate { edges: labels })
}

/// Maps fractional weights of the contracted hypergraph back to `h`:
/// preimage weights are summed and capped at one.
pub fn translate_weights(h: &Hypergraph, contracted: &Contracted, weights: &FractionalWeights) -> Result<FractionalWeights> {
    let mut acc: BTreeMap<String, Rational> = BTreeMap::new();
    for (l, w) in &weights.weights {
        let origin = match contracted.preimage(l) {
            Some(Preimage::Edge(o)) => o.to_string(),
            Some(Preimage::Apex { vertex, .. }) => apex_stand_in(h, vertex)?.to_string(),
            None => return internal(format!("weighted edge {l} is not in the contracted hypergraph")),
        };
        *acc.entry(origin).or_insert_with(Rational::zero) += w;
    }
    let one = Rational::one();
    for w in acc.values_mut() {
        if *w > one {
            *w = one.clone();
        }
    }
    let total = acc.values().fold(Rational::zero(), |a, w| a + w);
    Ok(FractionalWeights { weights: acc, total })
}

/// A balanced separator for `s` with `ρ(X) ≤ k`, or `None` if there is none.
///
/// Requires `ρ(s) ≥ 3k+1`. Complete when `ρ(s)` is not a multiple of 3
/// (in particular for `3k+1` and `6k+1`); sound always.
pub fn balanced_separator(h: &Hypergraph, s: &VertexSet, k: usize) -> Result<Option<SeparatorResult>> {
    h.require_subset(s, "balanced set")?;
    let rho = cover_number(h, s)?;
    if rho < 3 * k + 1 {
        return domain(format!("balanced separators need cover(S) >= 3k+1 = {}, got {rho}", 3 * k + 1));
    }
    let total = integer(rho as i64);
    let budget = integer(k as i64);
    let cands = candidates(h, s, &total, &budget, CoverMeasure::Integral, &[2])?;
    let found = cands
        .partitions
        .par_iter()
        .map(|parts| -> Result<Option<SeparatorResult>> {
            let contracted = apex_hypergraph(h, s, parts)?;
            let t = &contracted.terminals;
            let Some(res) = st_separator_with_cover(&contracted.hypergraph, t[0], t[1], k)? else {
                return Ok(None);
            };
            let Certificate::Integral(cert) = &res.certificate else {
                return internal("terminal cut returned a fractional certificate");
            };
            let back = translate_certificate(h, &contracted, cert)?;
            if back.len() > k || !back.covers(h, &res.separator) {
                return internal("translated certificate does not witness the cover bound");
            }
            Ok(Some(SeparatorResult { separator: res.separator, certificate: Certificate::Integral(back) }))
        })
        .find_map_first(|r| r.transpose());
    let Some(found) = found.transpose()? else {
        return Ok(None);
    };
    if !is_balanced_separator(h, s, &found.separator, &budget, CoverMeasure::Integral)? {
        return internal("reduction produced an unbalanced separator");
    }
    Ok(Some(found))
}

/// A balanced fractional separator for `s` with `ρ*(X) ≤ k`, or `None`.
///
/// Requires `3k < ρ*(s) ≤ 3k+1`. Parts come in twos and threes.
pub fn fractional_balanced_separator(h: &Hypergraph, s: &VertexSet, k: &Rational) -> Result<Option<SeparatorResult>> {
    h.require_subset(s, "balanced set")?;
    if !k.is_positive() {
        return domain(format!("cover bound must be positive, got {k}"));
    }
    let total = fractional_cover_number(h, s)?.0;
    let three_k = k * integer(3);
    if total <= three_k || total > &three_k + integer(1) {
        return domain(format!("fractional balanced separators need 3k < cover*(S) <= 3k+1, got {total}"));
    }
    let cands = candidates(h, s, &total, k, CoverMeasure::Fractional, &[2, 3])?;
    let found = cands
        .partitions
        .par_iter()
        .map(|parts| -> Result<Option<SeparatorResult>> {
            let contracted = apex_hypergraph(h, s, parts)?;
            let Some(res) = multiway_cut_with_fractional_cover(&contracted.hypergraph, &contracted.terminals, k)? else {
                return Ok(None);
            };
            let Certificate::Fractional(w) = &res.certificate else {
                return internal("multiway cut returned an integral certificate");
            };
            let back = translate_weights(h, &contracted, w)?;
            if back.total > *k || !back.covers(h, &res.separator) {
                return internal("translated weights do not witness the cover bound");
            }
            Ok(Some(SeparatorResult { separator: res.separator, certificate: Certificate::Fractional(back) }))
        })
        .find_map_first(|r| r.transpose());
    let Some(found) = found.transpose()? else {
        return Ok(None);
    };
    if !is_balanced_separator(h, s, &found.separator, k, CoverMeasure::Fractional)? {
        return internal("reduction produced an unbalanced fractional separator");
    }
    Ok(Some(found))
}

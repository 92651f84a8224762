//! Exact integral and fractional edge covers.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, internal, Result};
use crate::hypergraph::Hypergraph;
use crate::ratlp::{integer, solve_min, Bounds, LinearProgram, LpOutcome, Rational, Relation};
use crate::vertex_set::VertexSet;

/// A set of edge labels whose union covers some vertex set.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoverCertificate {
    /// Labels in the host hypergraph's edge order.
    pub edges: Vec<String>,
}

impl CoverCertificate {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Whether every label names an edge of `h` and the edges cover `s`.
    pub fn covers(&self, h: &Hypergraph, s: &VertexSet) -> bool {
        let mut union = VertexSet::new();
        for l in &self.edges {
            match h.edge(l) {
                Some(e) => union.union_with(&e.vertices),
                None => return false,
            }
        }
        s.is_subset(&union)
    }
}

/// Edge weights in `[0, 1]` witnessing a fractional cover.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FractionalWeights {
    /// Non-zero weights only.
    pub weights: BTreeMap<String, Rational>,
    pub total: Rational,
}

impl FractionalWeights {
    pub fn weight(&self, label: &str) -> Rational {
        self.weights.get(label).cloned().unwrap_or_else(Rational::zero)
    }

    /// Exact check of all the invariants against `h` and the covered set `s`.
    pub fn covers(&self, h: &Hypergraph, s: &VertexSet) -> bool {
        let one = Rational::one();
        let mut sum = Rational::zero();
        for (l, w) in &self.weights {
            if h.edge(l).is_none() || w.is_negative() || *w > one {
                return false;
            }
            sum += w;
        }
        if sum != self.total {
            return false;
        }
        s.iter().all(|u| {
            let load = h
                .edges()
                .iter()
                .filter(|e| e.vertices.contains(u))
                .fold(Rational::zero(), |acc, e| acc + self.weight(&e.label));
            load >= one
        })
    }
}

/// Projections of the edges onto `target` that are maximal under inclusion,
/// each with the index of the first edge realizing it.
fn maximal_projections(h: &Hypergraph, target: &VertexSet) -> Vec<(usize, VertexSet)> {
    let mut projections: Vec<(usize, VertexSet)> = Vec::new();
    for (i, e) in h.edges().iter().enumerate() {
        let p = e.vertices.intersection(target);
        if !p.is_empty() {
            projections.push((i, p));
        }
    }
    prune_dominated(projections)
}

fn prune_dominated(projections: Vec<(usize, VertexSet)>) -> Vec<(usize, VertexSet)> {
    let mut kept: Vec<(usize, VertexSet)> = Vec::new();
    'outer: for (i, p) in projections.iter().enumerate() {
        for (j, q) in projections.iter().enumerate() {
            if i != j && p.1.is_subset(&q.1) && (p.1 != q.1 || j < i) {
                continue 'outer;
            }
        }
        kept.push(p.clone());
    }
    kept
}

/// Whether `target` is covered by at most `budget` of `candidates`.
///
/// Branches over the candidates containing the smallest uncovered vertex,
/// keeping only those whose remaining contribution is maximal.
pub(crate) fn can_cover(target: &VertexSet, candidates: &[VertexSet], budget: usize) -> bool {
    if target.is_empty() {
        return true;
    }
    if budget == 0 {
        return false;
    }
    let best = candidates.iter().map(|c| c.intersection(target).len()).max().unwrap_or(0);
    if best == 0 || target.len() > budget * best {
        return false;
    }
    let v = target.min().expect("non-empty");
    let branches: Vec<(usize, VertexSet)> = candidates
        .iter()
        .filter(|c| c.contains(v))
        .map(|c| c.intersection(target))
        .enumerate()
        .collect();
    prune_dominated(branches)
        .into_iter()
        .any(|(_, p)| can_cover(&target.difference(&p), candidates, budget - 1))
}

/// Minimum number of candidates covering `target`, or `None` if impossible.
pub(crate) fn min_cover(target: &VertexSet, candidates: &[VertexSet]) -> Option<usize> {
    if target.is_empty() {
        return Some(0);
    }
    let coverable = candidates.iter().fold(VertexSet::new(), |acc, c| acc.union(c));
    if !target.is_subset(&coverable) {
        return None;
    }
    let best = candidates.iter().map(|c| c.intersection(target).len()).max().unwrap_or(1);
    let lower = target.len().div_ceil(best);
    (lower..=target.len()).find(|&b| can_cover(target, candidates, b))
}

fn check_subset(h: &Hypergraph, s: &VertexSet) -> Result<()> {
    h.require_subset(s, "covered set")
}

/// `ρ_H(s)` without a witness.
pub fn cover_number(h: &Hypergraph, s: &VertexSet) -> Result<usize> {
    check_subset(h, s)?;
    let cands: Vec<VertexSet> = maximal_projections(h, s).into_iter().map(|(_, p)| p).collect();
    match min_cover(s, &cands) {
        Some(n) => Ok(n),
        None => internal("a vertex of the hypergraph lies in no edge"),
    }
}

/// `ρ_H(s)` with the lexicographically least minimum witness (by edge order).
pub fn edge_cover_number(h: &Hypergraph, s: &VertexSet) -> Result<(usize, CoverCertificate)> {
    let rho = cover_number(h, s)?;
    let projections: Vec<VertexSet> = h.edges().iter().map(|e| e.vertices.intersection(s)).collect();
    let mut chosen = Vec::with_capacity(rho);
    let mut remaining = s.clone();
    let mut next = 0;
    for slot in 0..rho {
        let left = rho - slot - 1;
        let pick = (next..projections.len()).find(|&i| {
            !projections[i].is_disjoint(&remaining)
                && can_cover(&remaining.difference(&projections[i]), &projections[i + 1..], left)
        });
        let Some(i) = pick else {
            return internal("lexicographic witness reconstruction failed");
        };
        chosen.push(h.edges()[i].label.clone());
        remaining.difference_with(&projections[i]);
        next = i + 1;
    }
    Ok((rho, CoverCertificate { edges: chosen }))
}

/// `ρ_H(s) ≤ p`, stopping as soon as a witness of size `p` is found.
pub fn is_cover_at_most(h: &Hypergraph, s: &VertexSet, p: usize) -> Result<bool> {
    check_subset(h, s)?;
    let cands: Vec<VertexSet> = maximal_projections(h, s).into_iter().map(|(_, p)| p).collect();
    Ok(can_cover(s, &cands, p))
}

/// `ρ*_H(s)` with an optimal weight vector.
pub fn fractional_cover_number(h: &Hypergraph, s: &VertexSet) -> Result<(Rational, FractionalWeights)> {
    check_subset(h, s)?;
    if s.is_empty() {
        return Ok((Rational::zero(), FractionalWeights::default()));
    }
    let cands = maximal_projections(h, s);
    let mut lp = LinearProgram::new(vec![integer(1); cands.len()]);
    lp.bounds = vec![Bounds::boxed(integer(0), integer(1)); cands.len()];
    for u in s.iter() {
        let row = cands
            .iter()
            .map(|(_, p)| if p.contains(u) { integer(1) } else { integer(0) })
            .collect();
        lp.constrain(row, Relation::Ge, integer(1));
    }
    match solve_min(&lp)? {
        LpOutcome::Optimal { value, point } => {
            let weights = cands
                .iter()
                .zip(point)
                .filter(|(_, w)| !w.is_zero())
                .map(|((i, _), w)| (h.edges()[*i].label.clone(), w))
                .collect();
            Ok((value.clone(), FractionalWeights { weights, total: value }))
        }
        _ => internal("the covering program of a hypergraph without isolated vertices is feasible"),
    }
}

/// `ρ*_H(s) ≤ k`, decided exactly.
pub fn is_fractional_cover_at_most(h: &Hypergraph, s: &VertexSet, k: &Rational) -> Result<bool> {
    if k.is_negative() {
        return domain(format!("negative cover bound {k}"));
    }
    check_subset(h, s)?;
    // Integral covers bound the fractional optimum from above.
    if let Some(p) = k.floor().to_integer().to_usize() {
        if is_cover_at_most(h, s, p)? {
            return Ok(true);
        }
    }
    Ok(fractional_cover_number(h, s)?.0 <= *k)
}

/// A witness for the cover number of one set, in either measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    Integral(CoverCertificate),
    Fractional(FractionalWeights),
}

/// Which cover number a width or balance condition is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoverMeasure {
    Integral,
    Fractional,
}

impl CoverMeasure {
    pub fn value(self, h: &Hypergraph, s: &VertexSet) -> Result<Rational> {
        match self {
            CoverMeasure::Integral => Ok(integer(cover_number(h, s)? as i64)),
            CoverMeasure::Fractional => Ok(fractional_cover_number(h, s)?.0),
        }
    }

    pub fn at_most(self, h: &Hypergraph, s: &VertexSet, bound: &Rational) -> Result<bool> {
        match self {
            CoverMeasure::Integral => {
                if bound.is_negative() {
                    return Ok(false);
                }
                match bound.floor().to_integer().to_usize() {
                    Some(p) => is_cover_at_most(h, s, p),
                    None => Ok(true),
                }
            }
            CoverMeasure::Fractional => {
                if bound.is_negative() {
                    return Ok(false);
                }
                is_fractional_cover_at_most(h, s, bound)
            }
        }
    }
}

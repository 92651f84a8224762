//! The hypergraph value type and its structural operations.
//!
//! Vertices are identified by string labels. Every hypergraph carries a
//! shared *universe* of labels, and vertex sets are bitsets of indices into
//! that universe. Induced sub-hypergraphs keep their parent's universe, so a
//! [`VertexSet`] computed on a sub-hypergraph can be used on the parent
//! without translation. Contractions extend the universe with the fresh
//! vertex labels; the indices of pre-existing vertices never change.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Result};
use crate::vertex_set::VertexSet;

/// Compares labels so that embedded numbers order numerically
/// (`e2 < e10`, `2 < 10`). Falls back to byte order to stay total.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut x, mut y) = (a.as_bytes(), b.as_bytes());
    loop {
        match (x.first(), y.first()) {
            (None, None) => return a.cmp(b),
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(c), Some(d)) if c.is_ascii_digit() && d.is_ascii_digit() => {
                let nx = x.iter().take_while(|c| c.is_ascii_digit()).count();
                let ny = y.iter().take_while(|c| c.is_ascii_digit()).count();
                let (dx, dy) = (&x[..nx], &y[..ny]);
                let tx = trim_zeros(dx);
                let ty = trim_zeros(dy);
                let ord = tx.len().cmp(&ty.len()).then_with(|| tx.cmp(ty));
                if ord != Ordering::Equal {
                    return ord;
                }
                x = &x[nx..];
                y = &y[ny..];
            }
            (Some(c), Some(d)) => {
                if c != d {
                    return c.cmp(d);
                }
                x = &x[1..];
                y = &y[1..];
            }
        }
    }
}

fn trim_zeros(digits: &[u8]) -> &[u8] {
    let z = digits.iter().take_while(|&&c| c == b'0').count();
    &digits[z..]
}

#[derive(Debug, Default)]
struct Universe {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl Universe {
    fn from_sorted(labels: Vec<String>) -> Self {
        let index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        Self { labels, index }
    }
}

/// A labeled hyperedge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub label: String,
    pub vertices: VertexSet,
}

/// A finite hypergraph without isolated vertices.
///
/// Edges are identified by label: two edges may have equal vertex sets.
/// Edges are kept sorted by [`natural_cmp`] on their labels.
#[derive(Clone)]
pub struct Hypergraph {
    universe: Arc<Universe>,
    vertices: VertexSet,
    edges: Vec<Edge>,
}

impl Hypergraph {
    /// Builds a hypergraph from labeled edges given as vertex-label lists.
    pub fn new<L, I, V>(edges: impl IntoIterator<Item = (L, I)>) -> Result<Self>
    where
        L: Into<String>,
        I: IntoIterator<Item = V>,
        V: Into<String>,
    {
        let raw: Vec<(String, Vec<String>)> = edges
            .into_iter()
            .map(|(l, vs)| (l.into(), vs.into_iter().map(Into::into).collect()))
            .collect();
        if raw.is_empty() {
            return domain("a hypergraph needs at least one edge");
        }
        let mut seen = HashSet::new();
        let mut labels: Vec<String> = Vec::new();
        for (label, vs) in &raw {
            if vs.is_empty() {
                return domain(format!("edge {label} is empty"));
            }
            if !seen.insert(label.as_str()) {
                return domain(format!("duplicate edge label {label}"));
            }
            labels.extend(vs.iter().cloned());
        }
        labels.sort_by(|a, b| natural_cmp(a, b));
        labels.dedup();
        let universe = Universe::from_sorted(labels);
        let edges = raw
            .into_iter()
            .map(|(label, vs)| Edge {
                label,
                vertices: vs.iter().map(|v| universe.index[v]).collect(),
            })
            .collect();
        let vertices = VertexSet::full(universe.labels.len());
        Ok(Self::from_parts(Arc::new(universe), vertices, edges))
    }

    /// Builds a hypergraph from unlabeled edges; labels become `e1, e2, ...`.
    pub fn from_unlabeled<I, V>(edges: impl IntoIterator<Item = I>) -> Result<Self>
    where
        I: IntoIterator<Item = V>,
        V: Into<String>,
    {
        Self::new(edges.into_iter().enumerate().map(|(i, e)| (format!("e{}", i + 1), e)))
    }

    fn from_parts(universe: Arc<Universe>, vertices: VertexSet, mut edges: Vec<Edge>) -> Self {
        edges.sort_by(|a, b| natural_cmp(&a.label, &b.label));
        Self { universe, vertices, edges }
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Maximum edge cardinality.
    pub fn rank(&self) -> usize {
        self.edges.iter().map(|e| e.vertices.len()).max().unwrap_or(0)
    }

    pub fn edge(&self, label: &str) -> Option<&Edge> {
        self.edge_index(label).map(|i| &self.edges[i])
    }

    pub fn edge_index(&self, label: &str) -> Option<usize> {
        self.edges.binary_search_by(|e| natural_cmp(&e.label, label)).ok()
    }

    /// Label of a vertex index. Panics on an index outside the universe.
    pub fn label(&self, v: usize) -> &str {
        &self.universe.labels[v]
    }

    /// Index of a vertex of this hypergraph.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.universe.index.get(label).copied().filter(|&v| self.vertices.contains(v))
    }

    /// Resolves vertex labels into a set, rejecting labels not in `V(H)`.
    pub fn set_of<S: AsRef<str>>(&self, labels: impl IntoIterator<Item = S>) -> Result<VertexSet> {
        let mut set = VertexSet::new();
        for l in labels {
            let l = l.as_ref();
            match self.index_of(l) {
                Some(v) => {
                    set.insert(v);
                }
                None => return domain(format!("unknown vertex {l}")),
            }
        }
        Ok(set)
    }

    pub fn labels_of(&self, set: &VertexSet) -> Vec<&str> {
        set.iter().map(|v| self.label(v)).collect()
    }

    pub(crate) fn require_subset(&self, set: &VertexSet, what: &str) -> Result<()> {
        if set.is_subset(&self.vertices) {
            Ok(())
        } else {
            domain(format!("{what} is not a subset of the vertex set"))
        }
    }

    /// The sub-hypergraph induced by `u`: edges `e ∩ u` for every edge
    /// meeting `u`, each keeping its origin label.
    pub fn induced(&self, u: &VertexSet) -> Result<Self> {
        self.require_subset(u, "induced vertex set")?;
        if u.is_empty() {
            return domain("cannot induce on the empty set");
        }
        let edges = self
            .edges
            .iter()
            .filter_map(|e| {
                let p = e.vertices.intersection(u);
                (!p.is_empty()).then(|| Edge { label: e.label.clone(), vertices: p })
            })
            .collect();
        Ok(Self::from_parts(self.universe.clone(), u.clone(), edges))
    }

    /// `H ∖ u`, i.e. the sub-hypergraph induced by the complement of `u`.
    pub fn remove(&self, u: &VertexSet) -> Result<Self> {
        self.require_subset(u, "removed vertex set")?;
        let rest = self.vertices.difference(u);
        if rest.is_empty() {
            return domain("removing every vertex leaves an empty hypergraph");
        }
        self.induced(&rest)
    }

    /// Connected components of `H`, ordered by smallest vertex.
    pub fn components(&self) -> Vec<VertexSet> {
        self.components_within(&self.vertices)
    }

    /// Connected components of `H[within]` without materializing it.
    pub fn components_within(&self, within: &VertexSet) -> Vec<VertexSet> {
        let incident = self.incidence();
        let mut seen = VertexSet::new();
        let mut out = Vec::new();
        for start in within.iter() {
            if seen.contains(start) {
                continue;
            }
            let mut comp = VertexSet::singleton(start);
            seen.insert(start);
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &ei in &incident[&v] {
                    for w in self.edges[ei].vertices.intersection(within).iter() {
                        if seen.insert(w) {
                            comp.insert(w);
                            queue.push_back(w);
                        }
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Vertex to incident edge indices.
    pub(crate) fn incidence(&self) -> HashMap<usize, Vec<usize>> {
        let mut inc: HashMap<usize, Vec<usize>> =
            self.vertices.iter().map(|v| (v, Vec::new())).collect();
        for (i, e) in self.edges.iter().enumerate() {
            for v in e.vertices.iter() {
                inc.entry(v).or_default().push(i);
            }
        }
        inc
    }

    /// Vertices outside `c` sharing an edge with `c`.
    pub fn neighborhood(&self, c: &VertexSet) -> VertexSet {
        let mut n = VertexSet::new();
        for e in &self.edges {
            if e.vertices.intersects(c) {
                n.union_with(&e.vertices);
            }
        }
        n.difference(c)
    }

    /// Contracts each part `S_i` of `spec` into its fresh vertex `s_i`.
    pub fn contract(&self, spec: &ContractionSpec) -> Result<Contracted> {
        spec.check_against(self)?;
        let mut labels = self.universe.labels.clone();
        let mut terminals = Vec::with_capacity(spec.parts.len());
        for (_, fresh) in &spec.parts {
            let idx = match self.universe.index.get(fresh) {
                Some(&i) => i,
                None => {
                    labels.push(fresh.clone());
                    labels.len() - 1
                }
            };
            terminals.push(idx);
        }
        let universe = Arc::new(Universe::from_sorted(labels));
        let merged = spec.parts.iter().fold(VertexSet::new(), |acc, (p, _)| acc.union(p));
        let mut vertices = self.vertices.difference(&merged);
        for &t in &terminals {
            vertices.insert(t);
        }
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let mut image = e.vertices.difference(&merged);
                for ((part, _), &t) in spec.parts.iter().zip(&terminals) {
                    if e.vertices.intersects(part) {
                        image.insert(t);
                    }
                }
                Edge { label: e.label.clone(), vertices: image }
            })
            .collect();
        Ok(Contracted {
            hypergraph: Self::from_parts(universe, vertices, edges),
            terminals,
            apex_edges: BTreeMap::new(),
        })
    }

    /// Contraction plus apex edges: every vertex of `s` outside all parts is
    /// joined by a fresh size-2 edge to every contracted terminal.
    pub fn contract_with_apex(&self, s: &VertexSet, spec: &ContractionSpec) -> Result<Contracted> {
        self.require_subset(s, "apex set")?;
        for (part, fresh) in &spec.parts {
            if !part.is_subset(s) {
                return domain(format!("part contracted into {fresh} is not inside the apex set"));
            }
        }
        let mut out = self.contract(spec)?;
        let merged = spec.parts.iter().fold(VertexSet::new(), |acc, (p, _)| acc.union(p));
        let leftover = s.difference(&merged);
        if leftover.is_empty() {
            return Ok(out);
        }
        let mut taken: HashSet<String> = self.edges.iter().map(|e| e.label.clone()).collect();
        let mut edges = out.hypergraph.edges.clone();
        for (ti, &t) in out.terminals.iter().enumerate() {
            for u in leftover.iter() {
                let mut label = format!("~{}~{}", out.hypergraph.label(t), self.label(u));
                while taken.contains(&label) {
                    label.push('\'');
                }
                taken.insert(label.clone());
                out.apex_edges.insert(label.clone(), (ti, u));
                edges.push(Edge { label, vertices: [t, u].into_iter().collect() });
            }
        }
        out.hypergraph = Self::from_parts(
            out.hypergraph.universe.clone(),
            out.hypergraph.vertices.clone(),
            edges,
        );
        Ok(out)
    }

    /// Listing used for equality and debugging: sorted vertex labels and,
    /// per edge, its label with its vertex labels.
    fn listing(&self) -> (Vec<&str>, Vec<(&str, Vec<&str>)>) {
        let mut vs = self.labels_of(&self.vertices);
        vs.sort_by(|a, b| natural_cmp(a, b));
        let es = self
            .edges
            .iter()
            .map(|e| {
                let mut l = self.labels_of(&e.vertices);
                l.sort_by(|a, b| natural_cmp(a, b));
                (e.label.as_str(), l)
            })
            .collect();
        (vs, es)
    }
}

impl PartialEq for Hypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.listing() == other.listing()
    }
}

impl Eq for Hypergraph {}

impl fmt::Debug for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (vs, es) = self.listing();
        f.debug_struct("Hypergraph").field("vertices", &vs).field("edges", &es).finish()
    }
}

/// Parts `S_i ← s_i` of a (multi-)contraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionSpec {
    parts: Vec<(VertexSet, String)>,
}

impl ContractionSpec {
    pub fn new(parts: Vec<(VertexSet, String)>) -> Result<Self> {
        if parts.is_empty() || parts.len() > 3 {
            return domain(format!("a contraction has 1 to 3 parts, got {}", parts.len()));
        }
        let mut union = VertexSet::new();
        let mut names = HashSet::new();
        for (part, fresh) in &parts {
            if part.is_empty() {
                return domain(format!("part for {fresh} is empty"));
            }
            if union.intersects(part) {
                return domain("contraction parts overlap");
            }
            if !names.insert(fresh.as_str()) {
                return domain(format!("fresh label {fresh} used twice"));
            }
            union.union_with(part);
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[(VertexSet, String)] {
        &self.parts
    }

    fn check_against(&self, h: &Hypergraph) -> Result<()> {
        for (part, fresh) in &self.parts {
            h.require_subset(part, "contraction part")?;
            if h.index_of(fresh).is_some() {
                return domain(format!("fresh label {fresh} already names a vertex"));
            }
        }
        Ok(())
    }
}

/// Where an edge of a contracted hypergraph came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Preimage<'a> {
    /// The image of the origin edge with the same label.
    Edge(&'a str),
    /// A synthetic apex edge joining terminal `terminal` to `vertex`.
    Apex { terminal: usize, vertex: usize },
}

/// Result of a contraction, keeping what is needed to map edges back.
#[derive(Debug, Clone)]
pub struct Contracted {
    pub hypergraph: Hypergraph,
    /// Universe index of each fresh vertex `s_i`, in part order.
    pub terminals: Vec<usize>,
    apex_edges: BTreeMap<String, (usize, usize)>,
}

impl Contracted {
    pub fn preimage<'a>(&self, label: &'a str) -> Option<Preimage<'a>> {
        if let Some(&(terminal, vertex)) = self.apex_edges.get(label) {
            return Some(Preimage::Apex { terminal, vertex });
        }
        self.hypergraph.edge(label).map(|_| Preimage::Edge(label))
    }

    pub fn num_apex_edges(&self) -> usize {
        self.apex_edges.len()
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn one() -> Hypergraph {
        Hypergraph::new([("abc", ["a", "b", "c"])]).unwrap()
    }

    pub fn tri() -> Hypergraph {
        Hypergraph::new([("ab", ["a", "b"]), ("bc", ["b", "c"]), ("ca", ["a", "c"])]).unwrap()
    }

    pub fn path(n: usize) -> Hypergraph {
        Hypergraph::from_unlabeled((1..n).map(|i| [i.to_string(), (i + 1).to_string()])).unwrap()
    }

    pub fn k44() -> Hypergraph {
        let mut edges = Vec::new();
        for i in 1..=4 {
            for j in 1..=4 {
                edges.push([format!("u{i}"), format!("v{j}")]);
            }
        }
        Hypergraph::from_unlabeled(edges).unwrap()
    }

    pub fn set(h: &Hypergraph, labels: &[&str]) -> VertexSet {
        h.set_of(labels.iter().copied()).unwrap()
    }

    pub fn edge_sets(h: &Hypergraph) -> Vec<(String, Vec<String>)> {
        h.edges()
            .iter()
            .map(|e| (e.label.clone(), h.labels_of(&e.vertices).iter().map(|s| s.to_string()).collect()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn es(h: &Hypergraph) -> Vec<Vec<String>> {
        edge_sets(h).into_iter().map(|(_, v)| v).collect()
    }

    #[test]
    fn natural_order() {
        assert_eq!(natural_cmp("e2", "e10"), Ordering::Less);
        assert_eq!(natural_cmp("10", "9"), Ordering::Greater);
        assert_eq!(natural_cmp("a", "a1"), Ordering::Less);
        assert_eq!(natural_cmp("x01", "x1"), Ordering::Less);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(Hypergraph::new(Vec::<(String, Vec<String>)>::new()).is_err());
        assert!(Hypergraph::new([("e", Vec::<String>::new())]).is_err());
        assert!(Hypergraph::new([("e", ["a"]), ("e", ["b"])]).is_err());
    }

    #[test]
    fn rank_and_labels() {
        let h = path(5);
        assert_eq!(h.rank(), 2);
        assert_eq!(h.labels_of(h.vertices()), ["1", "2", "3", "4", "5"]);
        assert_eq!(one().rank(), 3);
    }

    #[test]
    fn induced_keeps_labels_and_size_one_edges() {
        let t = tri();
        let i = t.induced(&set(&t, &["a", "b"])).unwrap();
        assert_eq!(
            edge_sets(&i),
            vec![
                ("ab".to_string(), vec!["a".to_string(), "b".to_string()]),
                ("bc".to_string(), vec!["b".to_string()]),
                ("ca".to_string(), vec!["a".to_string()]),
            ]
        );
        let p = path(5);
        let i = p.induced(&set(&p, &["1", "2", "3"])).unwrap();
        assert_eq!(es(&i), vec![vec!["1", "2"], vec!["2", "3"], vec!["3"]]);
    }

    #[test]
    fn induced_errors() {
        let t = tri();
        assert!(t.induced(&VertexSet::new()).is_err());
        assert!(t.induced(&VertexSet::singleton(17)).is_err());
    }

    #[test]
    fn remove_cases() {
        let p = path(5);
        let r = p.remove(&set(&p, &["3"])).unwrap();
        assert_eq!(r.labels_of(r.vertices()), ["1", "2", "4", "5"]);
        assert_eq!(es(&r), vec![vec!["1", "2"], vec!["2"], vec!["4"], vec!["4", "5"]]);
        assert_eq!(p.remove(&VertexSet::new()).unwrap(), p);
        let t = tri();
        let r = t.remove(&set(&t, &["c"])).unwrap();
        assert_eq!(es(&r), vec![vec!["a", "b"], vec!["b"], vec!["a"]]);
        assert!(t.remove(t.vertices()).is_err());
    }

    #[test]
    fn components_cases() {
        let p = path(5);
        let r = p.remove(&set(&p, &["3"])).unwrap();
        assert_eq!(r.components(), vec![set(&p, &["1", "2"]), set(&p, &["4", "5"])]);
        assert_eq!(tri().components().len(), 1);
        let two = Hypergraph::from_unlabeled([["a", "b"], ["b", "c"], ["a", "c"], ["x", "y"], ["y", "z"], ["x", "z"]])
            .unwrap();
        let c = two.components();
        assert_eq!(c.len(), 2);
        assert!(c.iter().all(|s| s.len() == 3));
    }

    #[test]
    fn contract_path_segment() {
        let p = path(5);
        let spec = ContractionSpec::new(vec![(set(&p, &["2", "3"]), "w".into())]).unwrap();
        let c = p.contract(&spec).unwrap();
        assert_eq!(es(&c.hypergraph), vec![vec!["1", "w"], vec!["w"], vec!["4", "w"], vec!["4", "5"]]);
        assert_eq!(c.preimage("e2"), Some(Preimage::Edge("e2")));
    }

    #[test]
    fn contract_everything_and_singletons() {
        let t = tri();
        let all = t.contract(&ContractionSpec::new(vec![(t.vertices().clone(), "u".into())]).unwrap()).unwrap();
        assert_eq!(all.hypergraph.labels_of(all.hypergraph.vertices()), ["u"]);
        assert!(es(&all.hypergraph).iter().all(|e| e == &vec!["u".to_string()]));
        let x = t.contract(&ContractionSpec::new(vec![(set(&t, &["a"]), "x".into())]).unwrap()).unwrap();
        assert_eq!(es(&x.hypergraph), vec![vec!["b", "x"], vec!["b", "c"], vec!["c", "x"]]);
    }

    #[test]
    fn contract_errors() {
        let t = tri();
        assert!(ContractionSpec::new(vec![(set(&t, &["a", "b"]), "x".into()), (set(&t, &["b"]), "y".into())]).is_err());
        let spec = ContractionSpec::new(vec![(set(&t, &["a"]), "b".into())]).unwrap();
        assert!(t.contract(&spec).is_err());
        assert!(ContractionSpec::new(vec![]).is_err());
    }

    #[test]
    fn apex_construction() {
        let p = path(5);
        let s = set(&p, &["1", "3", "5"]);
        let spec = ContractionSpec::new(vec![(set(&p, &["1"]), "s1".into()), (set(&p, &["5"]), "s2".into())]).unwrap();
        let c = p.contract_with_apex(&s, &spec).unwrap();
        assert_eq!(c.num_apex_edges(), 2);
        let apex: Vec<Vec<String>> = edge_sets(&c.hypergraph)
            .into_iter()
            .filter(|(l, _)| matches!(c.preimage(l), Some(Preimage::Apex { .. })))
            .map(|(_, v)| v)
            .collect();
        assert_eq!(apex, vec![vec!["3", "s1"], vec!["3", "s2"]]);

        let bad = ContractionSpec::new(vec![(set(&p, &["2"]), "s1".into())]).unwrap();
        assert!(p.contract_with_apex(&s, &bad).is_err());
    }

    #[test]
    fn apex_without_leftover_and_three_parts() {
        let p = path(9);
        let s = set(&p, &["1", "5", "9"]);
        let spec = ContractionSpec::new(vec![
            (set(&p, &["1"]), "t1".into()),
            (set(&p, &["5"]), "t2".into()),
            (set(&p, &["9"]), "t3".into()),
        ])
        .unwrap();
        let c = p.contract_with_apex(&s, &spec).unwrap();
        assert_eq!(c.num_apex_edges(), 0);
        assert_eq!(c.hypergraph.num_edges(), p.num_edges());
        assert_eq!(c.terminals.len(), 3);
    }
}

//! Tree decompositions: the value type, the axiom validator, width
//! evaluators and the balanced-node walk.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::cover::{edge_cover_number, fractional_cover_number, CoverCertificate, CoverMeasure, FractionalWeights};
use crate::error::{domain, internal, Result};
use crate::hypergraph::Hypergraph;
use crate::ratlp::{integer, Rational};
use crate::vertex_set::VertexSet;

/// A tree decomposition: bags keyed by node id plus undirected tree edges.
///
/// Edges are stored normalized as `(a, b)` with `a < b`. Construction does
/// not enforce the tree shape; `validate` reports it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: BTreeMap<usize, VertexSet>,
    edges: BTreeSet<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn new(bags: impl IntoIterator<Item = (usize, VertexSet)>, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Self {
            bags: bags.into_iter().collect(),
            edges: edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect(),
        }
    }

    pub fn single(bag: VertexSet) -> Self {
        Self::new([(0, bag)], [])
    }

    pub fn bags(&self) -> &BTreeMap<usize, VertexSet> {
        &self.bags
    }

    pub fn bag(&self, node: usize) -> Option<&VertexSet> {
        self.bags.get(&node)
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.bags.keys().copied()
    }

    pub fn num_nodes(&self) -> usize {
        self.bags.len()
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    /// Adds a bag under the next free id and returns that id.
    pub fn add_bag(&mut self, bag: VertexSet) -> usize {
        let id = self.bags.keys().next_back().map_or(0, |m| m + 1);
        self.bags.insert(id, bag);
        id
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        self.edges.insert((a.min(b), a.max(b)));
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) -> bool {
        self.edges.remove(&(a.min(b), a.max(b)))
    }

    /// Removes a node and its incident edges, returning its bag.
    pub fn remove_node(&mut self, node: usize) -> Option<VertexSet> {
        self.edges.retain(|&(a, b)| a != node && b != node);
        self.bags.remove(&node)
    }

    pub fn bag_mut(&mut self, node: usize) -> Option<&mut VertexSet> {
        self.bags.get_mut(&node)
    }

    /// Copies `other` into `self` under fresh ids, joining `other_root` to
    /// `attach_to`. Returns the new id of `other_root`.
    pub fn graft(&mut self, other: &TreeDecomposition, other_root: usize, attach_to: usize) -> usize {
        let mut ids = BTreeMap::new();
        for (&id, bag) in &other.bags {
            ids.insert(id, self.add_bag(bag.clone()));
        }
        for &(a, b) in &other.edges {
            if let (Some(&x), Some(&y)) = (ids.get(&a), ids.get(&b)) {
                self.add_edge(x, y);
            }
        }
        let root = ids[&other_root];
        self.add_edge(root, attach_to);
        root
    }

    /// Neighbours of `node` in ascending order.
    pub fn neighbors(&self, node: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| if a == node { Some(b) } else if b == node { Some(a) } else { None })
            .collect();
        out.sort_unstable();
        out
    }

    /// Nodes reachable from `from` without passing through `blocked`.
    pub fn reachable(&self, from: usize, blocked: Option<usize>) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([from]);
        let mut stack = vec![from];
        while let Some(x) = stack.pop() {
            for y in self.neighbors(x) {
                if Some(y) != blocked && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// Union of the bags of `nodes`.
    pub fn union_of<'a>(&self, nodes: impl IntoIterator<Item = &'a usize>) -> VertexSet {
        let mut out = VertexSet::new();
        for n in nodes {
            if let Some(b) = self.bags.get(n) {
                out.union_with(b);
            }
        }
        out
    }

    /// Branches at `node`: for each neighbour (ascending), the node set of
    /// the component of `T ∖ node` containing it.
    pub fn branches(&self, node: usize) -> Vec<(usize, BTreeSet<usize>)> {
        self.neighbors(node).into_iter().map(|y| (y, self.reachable(y, Some(node)))).collect()
    }
}

/// One failed axiom of a tree decomposition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    /// The tree edges do not form a tree on the nodes.
    NotATree { detail: String },
    /// A bag holds something that is not a vertex of the hypergraph.
    ForeignVertex { node: usize, vertex: usize },
    /// A vertex appears in no bag.
    UncoveredVertex { vertex: usize },
    /// No bag contains this edge.
    UncontainedEdge { edge: String },
    /// The nodes whose bags hold this vertex are not connected.
    DisconnectedOccurrence { vertex: usize, nodes: Vec<usize> },
}

impl Violation {
    pub fn axiom(&self) -> &'static str {
        match self {
            Violation::NotATree { .. } => "tree",
            Violation::ForeignVertex { .. } => "domain",
            Violation::UncoveredVertex { .. } => "union",
            Violation::UncontainedEdge { .. } => "containment",
            Violation::DisconnectedOccurrence { .. } => "connectedness",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Renders the report with vertex labels from `h`.
    pub fn describe(&self, h: &Hypergraph) -> String {
        let name = |v: usize| {
            if h.vertices().contains(v) {
                h.label(v).to_string()
            } else {
                format!("#{v}")
            }
        };
        let mut out = String::new();
        for v in &self.violations {
            let line = match v {
                Violation::NotATree { detail } => format!("not a tree: {detail}"),
                Violation::ForeignVertex { node, vertex } => {
                    format!("bag {node} holds {} which is not a vertex", name(*vertex))
                }
                Violation::UncoveredVertex { vertex } => format!("vertex {} is in no bag", name(*vertex)),
                Violation::UncontainedEdge { edge } => format!("edge {edge} is in no bag"),
                Violation::DisconnectedOccurrence { vertex, nodes } => {
                    format!("bags holding {} are not connected: {nodes:?}", name(*vertex))
                }
            };
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            write!(f, "valid")
        } else {
            write!(f, "{} violation(s): {:?}", self.violations.len(), self.violations)
        }
    }
}

fn tree_violations(td: &TreeDecomposition) -> Vec<Violation> {
    let mut out = Vec::new();
    if td.bags.is_empty() {
        out.push(Violation::NotATree { detail: "no nodes".into() });
        return out;
    }
    let mut well_formed = true;
    for &(a, b) in &td.edges {
        if a == b {
            out.push(Violation::NotATree { detail: format!("self-loop at node {a}") });
            well_formed = false;
        } else if !td.bags.contains_key(&a) || !td.bags.contains_key(&b) {
            out.push(Violation::NotATree { detail: format!("edge {a}-{b} names a missing node") });
            well_formed = false;
        }
    }
    if !well_formed {
        return out;
    }
    let first = *td.bags.keys().next().expect("non-empty");
    let reached = td.reachable(first, None);
    if reached.len() != td.bags.len() {
        let missing: Vec<usize> = td.bags.keys().filter(|n| !reached.contains(n)).copied().collect();
        out.push(Violation::NotATree { detail: format!("nodes {missing:?} are disconnected from node {first}") });
    } else if td.edges.len() != td.bags.len() - 1 {
        out.push(Violation::NotATree {
            detail: format!("{} edges on {} nodes form a cycle", td.edges.len(), td.bags.len()),
        });
    }
    out
}

/// Checks every tree-decomposition axiom and reports all violations.
pub fn validate(h: &Hypergraph, td: &TreeDecomposition) -> ValidationReport {
    let mut violations = tree_violations(td);
    let mut all = VertexSet::new();
    for (&node, bag) in &td.bags {
        for v in bag.difference(h.vertices()).iter() {
            violations.push(Violation::ForeignVertex { node, vertex: v });
        }
        all.union_with(bag);
    }
    for v in h.vertices().difference(&all).iter() {
        violations.push(Violation::UncoveredVertex { vertex: v });
    }
    for e in h.edges() {
        if !td.bags.values().any(|b| e.vertices.is_subset(b)) {
            violations.push(Violation::UncontainedEdge { edge: e.label.clone() });
        }
    }
    for v in all.intersection(h.vertices()).iter() {
        let holding: Vec<usize> = td.bags.iter().filter(|(_, b)| b.contains(v)).map(|(&n, _)| n).collect();
        let start = holding[0];
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for y in td.neighbors(x) {
                if td.bags.get(&y).is_some_and(|b| b.contains(v)) && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        if seen.len() != holding.len() {
            violations.push(Violation::DisconnectedOccurrence { vertex: v, nodes: holding });
        }
    }
    ValidationReport { violations }
}

fn require_valid(h: &Hypergraph, td: &TreeDecomposition) -> Result<()> {
    let report = validate(h, td);
    if report.is_valid() {
        Ok(())
    } else {
        domain(format!("invalid tree decomposition: {}", report.describe(h).trim_end()))
    }
}

/// Generalized hypertree width of `td` with a minimum edge cover per bag.
pub fn ghw_width(h: &Hypergraph, td: &TreeDecomposition) -> Result<(usize, BTreeMap<usize, CoverCertificate>)> {
    require_valid(h, td)?;
    let mut width = 0;
    let mut certs = BTreeMap::new();
    for (&node, bag) in &td.bags {
        let (rho, cert) = edge_cover_number(h, bag)?;
        width = width.max(rho);
        certs.insert(node, cert);
    }
    Ok((width, certs))
}

/// Fractional hypertree width of `td` with optimal weights per bag.
pub fn fhw_width(h: &Hypergraph, td: &TreeDecomposition) -> Result<(Rational, BTreeMap<usize, FractionalWeights>)> {
    require_valid(h, td)?;
    let mut width = integer(0);
    let mut weights = BTreeMap::new();
    for (&node, bag) in &td.bags {
        let (rho, w) = fractional_cover_number(h, bag)?;
        if rho > width {
            width = rho;
        }
        weights.insert(node, w);
    }
    Ok((width, weights))
}

/// Walks from `start` (default: smallest node id) towards the heavy side
/// until reaching a node whose bag is a balanced separator for `s`.
///
/// Requires a valid `td` of width at most `k` and `ρ(s) ≥ 3k+1`.
pub fn find_balanced_node(
    h: &Hypergraph,
    td: &TreeDecomposition,
    s: &VertexSet,
    k: usize,
    start: Option<usize>,
) -> Result<usize> {
    find_balanced_node_with(h, td, s, &integer(k as i64), CoverMeasure::Integral, start)
}

/// The same walk under either cover measure. For the fractional measure
/// the precondition is `ρ*(s) > 3k`.
pub fn find_balanced_node_with(
    h: &Hypergraph,
    td: &TreeDecomposition,
    s: &VertexSet,
    k: &Rational,
    measure: CoverMeasure,
    start: Option<usize>,
) -> Result<usize> {
    require_valid(h, td)?;
    h.require_subset(s, "balanced set")?;
    for bag in td.bags.values() {
        if !measure.at_most(h, bag, k)? {
            return domain(format!("decomposition has a bag with cover above {k}"));
        }
    }
    let total = measure.value(h, s)?;
    if total <= k * integer(3) {
        return domain(format!("the set to balance has cover {total}, need more than 3k = {}", k * integer(3)));
    }
    let mut x = match start {
        Some(n) if td.bags.contains_key(&n) => n,
        Some(n) => return domain(format!("start node {n} is not in the decomposition")),
        None => *td.bags.keys().next().expect("validated decomposition has nodes"),
    };
    let two_thirds = &total * integer(2);
    let mut came_from: Option<usize> = None;
    for _ in 0..td.num_nodes() {
        let bx = &td.bags[&x];
        let mut heavy = Vec::new();
        for (y, part) in td.branches(x) {
            if Some(y) == came_from {
                continue;
            }
            let piece = td.union_of(&part).difference(bx).intersection(s);
            if measure.value(h, &piece)? * integer(3) >= two_thirds {
                heavy.push(y);
            }
        }
        match heavy.as_slice() {
            [] => {
                if !crate::separators::is_balanced_separator(h, s, bx, k, measure)? {
                    return internal(format!("walk stopped at node {x} whose bag is not balanced"));
                }
                return Ok(x);
            }
            [y] => {
                came_from = Some(x);
                x = *y;
            }
            _ => return internal(format!("node {x} has several heavy branches {heavy:?}")),
        }
    }
    internal("balanced-node walk did not terminate within the node count")
}

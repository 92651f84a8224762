//! Recursive approximation of generalized and fractional hypertree width.
//!
//! Each call grows its input set until it no longer fits the bag budget
//! `p`, splits the hypergraph with a balanced separator of that set and
//! recurses into every heavy component together with the separator.

use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use crate::cover::{Certificate, CoverMeasure};
use crate::decomposition::{fhw_width, ghw_width, validate, TreeDecomposition};
use crate::error::{domain, internal, Result};
use crate::hypergraph::Hypergraph;
use crate::ratlp::{integer, Rational};
use crate::separators::{balanced_separator, fractional_balanced_separator};
use crate::vertex_set::VertexSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Generalized hypertree width within a factor of 4 (bag budget `3k`).
    Ghw4,
    /// Generalized hypertree width within a factor of 6 (bag budget `6k`).
    Ghw6,
    /// Fractional hypertree width below `4k+1` (bag budget `3k`).
    Fhw,
}

impl Mode {
    pub fn measure(self) -> CoverMeasure {
        match self {
            Mode::Ghw4 | Mode::Ghw6 => CoverMeasure::Integral,
            Mode::Fhw => CoverMeasure::Fractional,
        }
    }

    /// Whether `width` is within the guarantee for parameter `k`.
    pub fn within_bound(self, width: &Rational, k: &Rational) -> bool {
        match self {
            Mode::Ghw4 => *width <= k * integer(4),
            Mode::Ghw6 => *width <= k * integer(6),
            Mode::Fhw => *width < k * integer(4) + integer(1),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunStats {
    /// Number of recursive calls, the top-level call included.
    pub invocations: usize,
    /// Deepest nesting reached; a call that does not recurse has depth 1.
    pub max_depth: usize,
}

impl RunStats {
    fn absorb(&mut self, other: RunStats) {
        self.invocations += other.invocations;
        self.max_depth = self.max_depth.max(other.max_depth);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ApproxOutcome {
    Decomposition {
        td: TreeDecomposition,
        width: Rational,
        certificates: BTreeMap<usize, Certificate>,
    },
    /// `witness` has cover above `3k` and no balanced separator of cover
    /// at most `k` in the sub-hypergraph induced by `scope`.
    Refusal { witness: VertexSet, scope: VertexSet },
}

impl ApproxOutcome {
    pub fn is_refusal(&self) -> bool {
        matches!(self, ApproxOutcome::Refusal { .. })
    }
}

struct Params {
    mode: Mode,
    k: Rational,
    budget: Rational,
    light: Rational,
}

enum Local {
    Td { td: TreeDecomposition, root: usize },
    No { witness: VertexSet, scope: VertexSet },
}

fn approx_rec(h: &Hypergraph, s: &VertexSet, params: &Params) -> Result<(Local, RunStats)> {
    let measure = params.mode.measure();
    let mut stats = RunStats { invocations: 1, max_depth: 1 };
    let all = h.vertices();
    if measure.at_most(h, all, &params.budget)? {
        return Ok((Local::Td { td: TreeDecomposition::single(all.clone()), root: 0 }, stats));
    }
    let mut grown = s.clone();
    for v in all.difference(s).iter() {
        if !measure.at_most(h, &grown, &params.budget)? {
            break;
        }
        grown.insert(v);
    }
    if measure.at_most(h, &grown, &params.budget)? {
        return Ok((Local::Td { td: TreeDecomposition::single(all.clone()), root: 0 }, stats));
    }
    let found = match params.mode {
        Mode::Ghw4 | Mode::Ghw6 => {
            let k = params.k.to_integer().to_usize().expect("integral parameter");
            if measure.value(h, &grown)? != &params.budget + integer(1) {
                return internal("grown set does not have cover exactly one above the budget");
            }
            balanced_separator(h, &grown, k)?
        }
        Mode::Fhw => fractional_balanced_separator(h, &grown, &params.k)?,
    };
    let Some(found) = found else {
        return Ok((Local::No { witness: grown, scope: all.clone() }, stats));
    };
    let x = found.separator;
    let mut comps = h.components_within(&all.difference(&x));
    comps.sort();
    let mut heavy = Vec::new();
    for (i, c) in comps.iter().enumerate() {
        if measure.value(h, c)? >= params.light {
            heavy.push(i);
        }
    }
    let children: Vec<Result<(Local, RunStats)>> = heavy
        .par_iter()
        .map(|&i| {
            let c = &comps[i];
            let sub = h.induced(&c.union(&x))?;
            let sub_s = grown.intersection(c).union(&x);
            approx_rec(&sub, &sub_s, params)
        })
        .collect();
    let mut child_tds = BTreeMap::new();
    let mut child_stats = RunStats::default();
    for (&i, child) in heavy.iter().zip(children) {
        let (local, st) = child?;
        child_stats.absorb(st);
        match local {
            Local::Td { td, root } => {
                child_tds.insert(i, (td, root));
            }
            no @ Local::No { .. } => {
                stats.invocations += child_stats.invocations;
                stats.max_depth += child_stats.max_depth;
                return Ok((no, stats));
            }
        }
    }
    stats.invocations += child_stats.invocations;
    stats.max_depth += child_stats.max_depth;

    let mut td = TreeDecomposition::single(s.union(&x));
    for (i, c) in comps.iter().enumerate() {
        match child_tds.get(&i) {
            Some((child, root)) => {
                let expected = grown.intersection(c).union(&x);
                if !child.bag(*root).is_some_and(|b| expected.is_subset(b)) {
                    return internal("child decomposition root does not contain its input set");
                }
                td.graft(child, *root, 0);
            }
            None => {
                let leaf = td.add_bag(c.union(&x));
                td.add_edge(0, leaf);
            }
        }
    }
    Ok((Local::Td { td, root: 0 }, stats))
}

fn finish(h: &Hypergraph, local: Local, params: &Params) -> Result<ApproxOutcome> {
    match local {
        Local::No { witness, scope } => Ok(ApproxOutcome::Refusal { witness, scope }),
        Local::Td { td, .. } => {
            let report = validate(h, &td);
            if !report.is_valid() {
                return internal(format!("constructed an invalid decomposition: {}", report.describe(h).trim_end()));
            }
            let (width, certificates) = match params.mode.measure() {
                CoverMeasure::Integral => {
                    let (w, certs) = ghw_width(h, &td)?;
                    (integer(w as i64), certs.into_iter().map(|(n, c)| (n, Certificate::Integral(c))).collect())
                }
                CoverMeasure::Fractional => {
                    let (w, weights) = fhw_width(h, &td)?;
                    (w, weights.into_iter().map(|(n, c)| (n, Certificate::Fractional(c))).collect())
                }
            };
            if !params.mode.within_bound(&width, &params.k) {
                return internal(format!("decomposition width {width} exceeds the guarantee for k = {}", params.k));
            }
            Ok(ApproxOutcome::Decomposition { td, width, certificates })
        }
    }
}

fn params(mode: Mode, k: &Rational) -> Result<Params> {
    if !k.is_positive() {
        return domain(format!("width parameter must be positive, got {k}"));
    }
    if mode != Mode::Fhw && !k.is_integer() {
        return domain(format!("generalized hypertree width parameter must be a natural number, got {k}"));
    }
    let factor = if mode == Mode::Ghw6 { 6 } else { 3 };
    Ok(Params { mode, k: k.clone(), budget: k * integer(factor), light: k * integer(3) })
}

fn run_connected(h: &Hypergraph, mode: Mode, k: &Rational) -> Result<(ApproxOutcome, RunStats)> {
    let params = params(mode, k)?;
    if !h.is_connected() {
        return internal("the recursive driver needs a connected hypergraph");
    }
    let (local, stats) = approx_rec(h, &VertexSet::new(), &params)?;
    Ok((finish(h, local, &params)?, stats))
}

/// Approximates generalized hypertree width on a connected hypergraph.
///
/// `Ghw4` returns a decomposition of width at most `4k`, `Ghw6` one of
/// width at most `6k`; a refusal means the width exceeds `k`.
pub fn approx_ghw(h: &Hypergraph, k: usize, mode: Mode) -> Result<(ApproxOutcome, RunStats)> {
    if mode == Mode::Fhw {
        return domain("approx_ghw takes Ghw4 or Ghw6");
    }
    if k == 0 {
        return domain("width parameter must be at least 1");
    }
    run_connected(h, mode, &integer(k as i64))
}

/// Approximates fractional hypertree width on a connected hypergraph:
/// a decomposition of width below `4k+1`, or a refusal meaning the width
/// exceeds `k`.
pub fn approx_fhw(h: &Hypergraph, k: &Rational) -> Result<(ApproxOutcome, RunStats)> {
    run_connected(h, Mode::Fhw, k)
}

/// Runs the driver on each connected component and joins the component
/// decompositions at their root bags.
pub fn approx_entry(h: &Hypergraph, k: &Rational, mode: Mode) -> Result<(ApproxOutcome, RunStats)> {
    let params = params(mode, k)?;
    let comps = h.components();
    if comps.len() == 1 {
        return run_connected(h, mode, k);
    }
    let runs: Vec<Result<(ApproxOutcome, RunStats)>> = comps
        .par_iter()
        .map(|c| run_connected(&h.induced(c)?, mode, k))
        .collect();
    let mut stats = RunStats::default();
    let mut td = TreeDecomposition::default();
    let mut first_root = None;
    for run in runs {
        let (outcome, st) = run?;
        stats.absorb(st);
        match outcome {
            ApproxOutcome::Refusal { .. } => return Ok((outcome, stats)),
            ApproxOutcome::Decomposition { td: part, .. } => match first_root {
                None => {
                    td = part;
                    first_root = Some(0);
                }
                Some(r) => {
                    td.graft(&part, 0, r);
                }
            },
        }
    }
    let local = Local::Td { td, root: 0 };
    Ok((finish(h, local, &params)?, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::fixtures::*;

    fn td_of(o: &ApproxOutcome) -> &TreeDecomposition {
        match o {
            ApproxOutcome::Decomposition { td, .. } => td,
            ApproxOutcome::Refusal { .. } => panic!("unexpected refusal"),
        }
    }

    #[test]
    fn single_edge_is_one_bag() {
        let h = one();
        let (o, st) = approx_ghw(&h, 1, Mode::Ghw4).unwrap();
        assert_eq!(td_of(&o).num_nodes(), 1);
        assert_eq!(st, RunStats { invocations: 1, max_depth: 1 });
        let ApproxOutcome::Decomposition { width, .. } = o else { unreachable!() };
        assert_eq!(width, integer(1));
    }

    #[test]
    fn long_path_is_split() {
        let p = path(9);
        for mode in [Mode::Ghw4, Mode::Ghw6] {
            let (o, st) = approx_ghw(&p, 1, mode).unwrap();
            assert!(validate(&p, td_of(&o)).is_valid());
            assert!(st.invocations <= 9 * 25);
        }
        let (o, _) = approx_fhw(&p, &integer(1)).unwrap();
        let ApproxOutcome::Decomposition { width, .. } = o else { panic!() };
        assert!(width < integer(5));
    }

    #[test]
    fn grid_like_refuses() {
        let k = k44();
        let (o, _) = approx_ghw(&k, 1, Mode::Ghw4).unwrap();
        let ApproxOutcome::Refusal { witness, scope } = o else { panic!("expected refusal") };
        assert!(balanced_separator(&k.induced(&scope).unwrap(), &witness, 1).unwrap().is_none());
        assert!(approx_fhw(&k, &integer(1)).unwrap().0.is_refusal());
    }

    #[test]
    fn triangle_fractional() {
        let (o, _) = approx_fhw(&tri(), &integer(2)).unwrap();
        let ApproxOutcome::Decomposition { td, width, .. } = o else { panic!() };
        assert_eq!(td.num_nodes(), 1);
        assert_eq!(width, crate::ratlp::rational(3, 2));
    }

    #[test]
    fn parameter_errors() {
        assert!(approx_ghw(&tri(), 0, Mode::Ghw4).is_err());
        assert!(approx_ghw(&tri(), 1, Mode::Fhw).is_err());
        assert!(approx_fhw(&tri(), &integer(0)).is_err());
        assert!(approx_entry(&tri(), &crate::ratlp::rational(3, 2), Mode::Ghw4).is_err());
        let two = Hypergraph::from_unlabeled([["a", "b"], ["c", "d"]]).unwrap();
        assert!(approx_ghw(&two, 1, Mode::Ghw4).is_err());
    }

    #[test]
    fn components_are_joined() {
        let h = Hypergraph::from_unlabeled([["a", "b"], ["b", "c"], ["a", "c"], ["x", "y"], ["y", "z"], ["x", "z"]]).unwrap();
        let (o, st) = approx_entry(&h, &integer(1), Mode::Ghw4).unwrap();
        let ApproxOutcome::Decomposition { td, width, .. } = o else { panic!() };
        assert!(validate(&h, &td).is_valid());
        assert_eq!(width, integer(2));
        assert_eq!(st.invocations, 2);
        let t = tri();
        assert_eq!(approx_entry(&t, &integer(1), Mode::Ghw4).unwrap(), approx_ghw(&t, 1, Mode::Ghw4).unwrap());
    }

    #[test]
    fn refusing_component_refuses() {
        let mut edges = edge_sets(&k44());
        edges.push(("z".into(), vec!["p".into(), "q".into()]));
        let h = Hypergraph::new(edges).unwrap();
        assert!(approx_entry(&h, &integer(1), Mode::Ghw4).unwrap().0.is_refusal());
    }
}

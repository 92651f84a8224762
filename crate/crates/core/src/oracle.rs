//! Exact generalized and fractional hypertree width for tiny hypergraphs.
//!
//! A component `C` with boundary `W = N(C)` is decomposable if some bag
//! `D ∪ W` (with `∅ ≠ D ⊆ C`) fits the width bound and every component of
//! `C ∖ D` is decomposable in turn. Any tree decomposition can be brought
//! into this shape without increasing a monotone bag measure, so the
//! search is exact. Vertices are mapped to bits of a local mask.

use std::collections::HashMap;

use num_traits::ToPrimitive;

use crate::cover::fractional_cover_number;
use crate::decomposition::TreeDecomposition;
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::ratlp::{integer, Rational};
use crate::vertex_set::VertexSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_vertices: usize,
    /// Upper limit on the number of subsets admitted as bags.
    pub max_candidate_bags: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self { max_vertices: 12, max_candidate_bags: 1 << 12 }
    }
}

type Mask = u32;

struct Local<'a> {
    h: &'a Hypergraph,
    verts: Vec<usize>,
    edges: Vec<Mask>,
    adj: Vec<Mask>,
    rank: usize,
}

impl<'a> Local<'a> {
    fn new(h: &'a Hypergraph, budget: &OracleBudget) -> Result<Self> {
        let n = h.num_vertices();
        if n > budget.max_vertices || n > 31 {
            return Err(Error::Budget(format!(
                "exact search handles at most {} vertices, got {n}",
                budget.max_vertices.min(31)
            )));
        }
        let verts: Vec<usize> = h.vertices().iter().collect();
        let bit = |v: usize| 1 << verts.binary_search(&v).expect("edge vertex in V(H)");
        let edges: Vec<Mask> = h.edges().iter().map(|e| e.vertices.iter().map(bit).sum()).collect();
        let mut adj = vec![0; n];
        for &e in &edges {
            for (i, a) in adj.iter_mut().enumerate() {
                if e >> i & 1 == 1 {
                    *a |= e;
                }
            }
        }
        Ok(Self { h, verts, edges, adj, rank: h.rank() })
    }

    fn full(&self) -> Mask {
        ((1u64 << self.verts.len()) - 1) as Mask
    }

    fn to_set(&self, m: Mask) -> VertexSet {
        (0..self.verts.len()).filter(|i| m >> i & 1 == 1).map(|i| self.verts[i]).collect()
    }

    fn components(&self, within: Mask) -> Vec<Mask> {
        let mut out = Vec::new();
        let mut left = within;
        while left != 0 {
            let mut comp: Mask = left & left.wrapping_neg();
            loop {
                let mut grown = comp;
                let mut bits = comp;
                while bits != 0 {
                    let i = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    grown |= self.adj[i] & within;
                }
                if grown == comp {
                    break;
                }
                comp = grown;
            }
            out.push(comp);
            left &= !comp;
        }
        out
    }

    fn boundary(&self, c: Mask) -> Mask {
        let mut n = 0;
        let mut bits = c;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            n |= self.adj[i];
        }
        n & !c
    }

    /// Integral cover number of every subset.
    fn rho_table(&self) -> Vec<u8> {
        let size = 1usize << self.verts.len();
        let mut rho = vec![0u8; size];
        for b in 1..size {
            let low = b.trailing_zeros();
            rho[b] = self
                .edges
                .iter()
                .filter(|&&e| e >> low & 1 == 1)
                .map(|&e| rho[b & !(e as usize)])
                .min()
                .map_or(u8::MAX, |r| r.saturating_add(1));
        }
        rho
    }
}

/// Exhaustive decision search; `fits` tells whether a bag is admissible.
struct Decide<'a, 'b> {
    local: &'a Local<'b>,
    fits: &'a mut dyn FnMut(Mask) -> Result<bool>,
    memo: HashMap<Mask, Option<Mask>>,
}

impl Decide<'_, '_> {
    fn decomposable(&mut self, c: Mask) -> Result<bool> {
        if let Some(r) = self.memo.get(&c) {
            return Ok(r.is_some());
        }
        let w = self.local.boundary(c);
        let mut chosen = None;
        let mut d = c;
        while d != 0 {
            if (self.fits)(d | w)? {
                let mut ok = true;
                for child in self.local.components(c & !d) {
                    if !self.decomposable(child)? {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    chosen = Some(d);
                    break;
                }
            }
            d = (d - 1) & c;
        }
        self.memo.insert(c, chosen);
        Ok(chosen.is_some())
    }

    fn run(&mut self) -> Result<Option<TreeDecomposition>> {
        let roots = self.local.components(self.local.full());
        for &c in &roots {
            if !self.decomposable(c)? {
                return Ok(None);
            }
        }
        let choices: HashMap<Mask, Mask> = self.memo.iter().filter_map(|(&c, &d)| d.map(|d| (c, d))).collect();
        Ok(Some(build(self.local, &roots, &choices)))
    }
}

fn build(local: &Local, roots: &[Mask], choices: &HashMap<Mask, Mask>) -> TreeDecomposition {
    fn place(local: &Local, c: Mask, choices: &HashMap<Mask, Mask>, td: &mut TreeDecomposition, parent: Option<usize>) {
        let d = choices[&c];
        let node = td.add_bag(local.to_set(d | local.boundary(c)));
        if let Some(p) = parent {
            td.add_edge(p, node);
        }
        for child in local.components(c & !d) {
            place(local, child, choices, td, Some(node));
        }
    }
    let mut td = TreeDecomposition::default();
    for &c in roots {
        let parent = if td.num_nodes() == 0 { None } else { Some(0) };
        place(local, c, choices, &mut td, parent);
    }
    td
}

fn check_candidates(budget: &OracleBudget, count: usize) -> Result<()> {
    if count > budget.max_candidate_bags {
        return Err(Error::Budget(format!(
            "{count} candidate bags exceed the limit of {}",
            budget.max_candidate_bags
        )));
    }
    Ok(())
}

/// Whether `ghw(H) ≤ k`, with a witness decomposition when it is.
pub fn exact_ghw_decide(h: &Hypergraph, k: usize, budget: &OracleBudget) -> Result<Option<TreeDecomposition>> {
    let local = Local::new(h, budget)?;
    let rho = local.rho_table();
    check_candidates(budget, rho.iter().filter(|&&r| (r as usize) <= k).count())?;
    let mut fits = |b: Mask| Ok((rho[b as usize] as usize) <= k);
    Decide { local: &local, fits: &mut fits, memo: HashMap::new() }.run()
}

/// Generalized hypertree width with an optimal decomposition.
pub fn exact_ghw(h: &Hypergraph, budget: &OracleBudget) -> Result<(usize, TreeDecomposition)> {
    let local = Local::new(h, budget)?;
    let rho = local.rho_table();
    let upper = rho[local.full() as usize] as usize;
    for k in 1..=upper {
        check_candidates(budget, rho.iter().filter(|&&r| (r as usize) <= k).count())?;
        let mut fits = |b: Mask| Ok((rho[b as usize] as usize) <= k);
        if let Some(td) = (Decide { local: &local, fits: &mut fits, memo: HashMap::new() }).run()? {
            return Ok((k, td));
        }
    }
    Err(Error::Internal("the single-bag decomposition was not found".into()))
}

struct Fractional<'a, 'b> {
    local: &'a Local<'b>,
    values: HashMap<Mask, Rational>,
}

impl Fractional<'_, '_> {
    fn value(&mut self, b: Mask) -> Result<Rational> {
        if let Some(v) = self.values.get(&b) {
            return Ok(v.clone());
        }
        let v = fractional_cover_number(self.local.h, &self.local.to_set(b))?.0;
        self.values.insert(b, v.clone());
        Ok(v)
    }

    /// Cheap lower bound: each edge covers at most `rank` vertices.
    fn lower_bound(&self, b: Mask) -> Rational {
        Rational::new((b.count_ones() as i64).into(), (self.local.rank.max(1) as i64).into())
    }
}

/// Whether `fhw(H) ≤ k`, with a witness decomposition when it is.
pub fn exact_fhw_decide(h: &Hypergraph, k: &Rational, budget: &OracleBudget) -> Result<Option<TreeDecomposition>> {
    let local = Local::new(h, budget)?;
    let rho = local.rho_table();
    let floor = k.floor().to_integer().to_usize().unwrap_or(0);
    let mut frac = Fractional { local: &local, values: HashMap::new() };
    let mut fits = |b: Mask| -> Result<bool> {
        if (rho[b as usize] as usize) <= floor {
            return Ok(true);
        }
        if frac.lower_bound(b) > *k {
            return Ok(false);
        }
        Ok(frac.value(b)? <= *k)
    };
    Decide { local: &local, fits: &mut fits, memo: HashMap::new() }.run()
}

/// Fractional hypertree width with an optimal decomposition.
pub fn exact_fhw(h: &Hypergraph, budget: &OracleBudget) -> Result<(Rational, TreeDecomposition)> {
    let local = Local::new(h, budget)?;
    let mut frac = Fractional { local: &local, values: HashMap::new() };
    let mut memo: HashMap<Mask, (Rational, Mask)> = HashMap::new();

    fn best(c: Mask, frac: &mut Fractional, memo: &mut HashMap<Mask, (Rational, Mask)>) -> Result<Rational> {
        if let Some((v, _)) = memo.get(&c) {
            return Ok(v.clone());
        }
        let local = frac.local;
        let w = local.boundary(c);
        let mut best_val: Option<Rational> = None;
        let mut best_d = c;
        let mut d = c;
        while d != 0 {
            let bag = d | w;
            let beaten = |v: &Rational, b: &Option<Rational>| b.as_ref().is_some_and(|b| v >= b);
            if !beaten(&frac.lower_bound(bag), &best_val) {
                let mut m = frac.value(bag)?;
                if !beaten(&m, &best_val) {
                    for child in local.components(c & !d) {
                        let cv = best(child, frac, memo)?;
                        if cv > m {
                            m = cv;
                        }
                        if beaten(&m, &best_val) {
                            break;
                        }
                    }
                    if !beaten(&m, &best_val) {
                        best_val = Some(m);
                        best_d = d;
                    }
                }
            }
            d = (d - 1) & c;
        }
        let v = best_val.expect("the whole component is always a candidate");
        memo.insert(c, (v.clone(), best_d));
        Ok(v)
    }

    let roots = local.components(local.full());
    let mut width = integer(0);
    for &c in &roots {
        let v = best(c, &mut frac, &mut memo)?;
        if v > width {
            width = v;
        }
    }
    let choices: HashMap<Mask, Mask> = memo.iter().map(|(&c, (_, d))| (c, *d)).collect();
    Ok((width, build(&local, &roots, &choices)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{fhw_width, ghw_width, validate};
    use crate::hypergraph::fixtures::*;
    use crate::ratlp::rational;

    fn b() -> OracleBudget {
        OracleBudget::default()
    }

    #[test]
    fn small_values() {
        assert_eq!(exact_ghw(&one(), &b()).unwrap().0, 1);
        assert_eq!(exact_ghw(&tri(), &b()).unwrap().0, 2);
        assert_eq!(exact_ghw(&path(5), &b()).unwrap().0, 1);
        assert_eq!(exact_fhw(&one(), &b()).unwrap().0, integer(1));
        assert_eq!(exact_fhw(&tri(), &b()).unwrap().0, rational(3, 2));
        assert_eq!(exact_fhw(&path(5), &b()).unwrap().0, integer(1));
    }

    #[test]
    fn witnesses_are_valid_and_optimal() {
        for h in [one(), tri(), path(6), k44()] {
            let (w, td) = exact_ghw(&h, &b()).unwrap();
            assert!(validate(&h, &td).is_valid());
            assert_eq!(ghw_width(&h, &td).unwrap().0, w);
            let (f, td) = exact_fhw(&h, &b()).unwrap();
            assert!(validate(&h, &td).is_valid());
            assert_eq!(fhw_width(&h, &td).unwrap().0, f);
            assert!(f <= integer(w as i64));
        }
    }

    #[test]
    fn k44_needs_a_full_side_in_one_bag() {
        let k = k44();
        assert!(exact_ghw_decide(&k, 1, &b()).unwrap().is_none());
        assert!(exact_ghw_decide(&k, 3, &b()).unwrap().is_none());
        assert!(exact_ghw_decide(&k, 4, &b()).unwrap().is_some());
        assert!(exact_fhw_decide(&k, &integer(1), &b()).unwrap().is_none());
        assert!(exact_fhw_decide(&k, &rational(7, 2), &b()).unwrap().is_none());
        assert!(exact_fhw_decide(&k, &integer(4), &b()).unwrap().is_some());
    }

    #[test]
    fn budget_is_enforced() {
        let tight = OracleBudget { max_vertices: 4, ..b() };
        assert!(matches!(exact_ghw(&path(6), &tight), Err(Error::Budget(_))));
        let few = OracleBudget { max_candidate_bags: 3, ..b() };
        assert!(matches!(exact_ghw_decide(&tri(), 1, &few), Err(Error::Budget(_))));
    }

    #[test]
    fn disconnected_input() {
        let h = Hypergraph::from_unlabeled([["a", "b"], ["c", "d"], ["d", "e"]]).unwrap();
        let (w, td) = exact_ghw(&h, &b()).unwrap();
        assert_eq!(w, 1);
        assert!(validate(&h, &td).is_valid());
    }
}

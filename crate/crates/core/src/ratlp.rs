//! Exact linear programming over arbitrary-precision rationals.
//!
//! A dense two-phase tableau simplex with Bland's rule. There is no
//! tolerance anywhere: every pivot is exact, and the returned optimum is
//! re-checked against the original program before it is handed out.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{domain, internal, Result};

/// Exact fraction in canonical form.
pub type Rational = BigRational;

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// Per-variable bounds. `None` means unbounded on that side.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl Bounds {
    pub fn nonnegative() -> Self {
        Self { lower: Some(Rational::zero()), upper: None }
    }

    pub fn boxed(lower: Rational, upper: Rational) -> Self {
        Self { lower: Some(lower), upper: Some(upper) }
    }

    pub fn free() -> Self {
        Self { lower: None, upper: None }
    }
}

/// `minimize objective·x` subject to the constraints and bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bounds>,
}

impl LinearProgram {
    /// A program over `objective.len()` non-negative variables.
    pub fn new(objective: Vec<Rational>) -> Self {
        let n = objective.len();
        Self { objective, constraints: Vec::new(), bounds: vec![Bounds::nonnegative(); n] }
    }

    pub fn constrain(&mut self, coefficients: Vec<Rational>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint { coefficients, relation, rhs });
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn check(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return domain(format!("{} bounds for {} variables", self.bounds.len(), n));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coefficients.len() != n {
                return domain(format!(
                    "constraint {i} has {} coefficients for {n} variables",
                    c.coefficients.len()
                ));
            }
        }
        for (j, b) in self.bounds.iter().enumerate() {
            if let (Some(l), Some(h)) = (&b.lower, &b.upper) {
                if l > h {
                    return domain(format!("variable {j} has lower bound {l} above upper bound {h}"));
                }
            }
        }
        Ok(())
    }

    /// Exact feasibility test for a candidate point.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        let in_bounds = self.bounds.iter().zip(x).all(|(b, v)| {
            b.lower.as_ref().is_none_or(|l| v >= l) && b.upper.as_ref().is_none_or(|h| v <= h)
        });
        in_bounds
            && self.constraints.iter().all(|c| {
                let lhs = dot(&c.coefficients, x);
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                }
            })
    }

    pub fn value_at(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (p, q)| acc + p * q)
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

/// How an original variable is expressed by non-negative tableau columns:
/// `x = offset + Σ sign·y`.
struct Substitution {
    offset: Rational,
    columns: Vec<(usize, bool)>,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    width: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize, objective: &mut [Rational]) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        if !objective[c].is_zero() {
            let f = objective[c].clone();
            for (v, pv) in objective.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Reduced-cost row (last entry is minus the objective value).
    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut z: Vec<Rational> = cost.to_vec();
        z.push(Rational::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if cost[b].is_zero() {
                continue;
            }
            for (v, rv) in z.iter_mut().zip(row) {
                *v -= &cost[b] * rv;
            }
        }
        z
    }

    /// Primal simplex with Bland's rule over the columns in `allowed`.
    fn run(&mut self, cost: &[Rational], allowed: &[bool]) -> Phase {
        let mut z = self.reduced_costs(cost);
        loop {
            let entering = (0..self.width).find(|&j| allowed[j] && z[j].is_negative());
            let Some(c) = entering else {
                return Phase::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return Phase::Unbounded;
            };
            self.pivot(r, c, &mut z);
        }
    }
}

/// Solves `lp` exactly.
pub fn solve_min(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.check()?;
    let n = lp.num_vars();

    let mut subs = Vec::with_capacity(n);
    let mut ny = 0;
    let mut rows: Vec<(Vec<(usize, Rational)>, Relation, Rational)> = Vec::new();
    for b in &lp.bounds {
        let sub = match (&b.lower, &b.upper) {
            (Some(l), upper) => {
                let y = ny;
                ny += 1;
                if let Some(h) = upper {
                    rows.push((vec![(y, Rational::one())], Relation::Le, h - l));
                }
                Substitution { offset: l.clone(), columns: vec![(y, true)] }
            }
            (None, Some(h)) => {
                ny += 1;
                Substitution { offset: h.clone(), columns: vec![(ny - 1, false)] }
            }
            (None, None) => {
                ny += 2;
                Substitution { offset: Rational::zero(), columns: vec![(ny - 2, true), (ny - 1, false)] }
            }
        };
        subs.push(sub);
    }
    for c in &lp.constraints {
        let mut coeffs = Vec::new();
        let mut rhs = c.rhs.clone();
        for (a, s) in c.coefficients.iter().zip(&subs) {
            if a.is_zero() {
                continue;
            }
            rhs -= a * &s.offset;
            for &(y, pos) in &s.columns {
                coeffs.push((y, if pos { a.clone() } else { -a }));
            }
        }
        rows.push((coeffs, c.relation, rhs));
    }

    // Normalize to non-negative right-hand sides.
    for (coeffs, rel, rhs) in rows.iter_mut() {
        if rhs.is_negative() {
            *rhs = -&*rhs;
            for (_, a) in coeffs.iter_mut() {
                *a = -&*a;
            }
            *rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let width = ny + n_slack + n_art;
    let art_start = ny + n_slack;
    let mut tableau = Tableau { rows: Vec::new(), basis: Vec::new(), width };
    let (mut next_slack, mut next_art) = (ny, art_start);
    for (coeffs, rel, rhs) in rows {
        let mut row = vec![Rational::zero(); width + 1];
        for (y, a) in coeffs {
            row[y] += a;
        }
        row[width] = rhs;
        match rel {
            Relation::Le => {
                row[next_slack] = Rational::one();
                tableau.basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -Rational::one();
                next_slack += 1;
                row[next_art] = Rational::one();
                tableau.basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = Rational::one();
                tableau.basis.push(next_art);
                next_art += 1;
            }
        }
        tableau.rows.push(row);
    }

    if n_art > 0 {
        let mut cost = vec![Rational::zero(); width];
        for c in cost.iter_mut().skip(art_start) {
            *c = Rational::one();
        }
        let allowed = vec![true; width];
        if let Phase::Unbounded = tableau.run(&cost, &allowed) {
            return internal("phase one of the simplex cannot be unbounded");
        }
        let infeasibility = tableau
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= art_start)
            .fold(Rational::zero(), |acc, (i, _)| acc + tableau.rhs(i));
        if infeasibility.is_positive() {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive zero-valued artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tableau.rows.len() {
            if tableau.basis[i] >= art_start {
                match (0..art_start).find(|&j| !tableau.rows[i][j].is_zero()) {
                    Some(j) => {
                        let mut scratch = vec![Rational::zero(); width + 1];
                        tableau.pivot(i, j, &mut scratch);
                    }
                    None => {
                        tableau.rows.remove(i);
                        tableau.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut cost = vec![Rational::zero(); width];
    for (a, s) in lp.objective.iter().zip(&subs) {
        for &(y, pos) in &s.columns {
            cost[y] += if pos { a.clone() } else { -a };
        }
    }
    let allowed: Vec<bool> = (0..width).map(|j| j < art_start).collect();
    if let Phase::Unbounded = tableau.run(&cost, &allowed) {
        return Ok(LpOutcome::Unbounded);
    }

    let mut y = vec![Rational::zero(); ny];
    for (i, &b) in tableau.basis.iter().enumerate() {
        if b < ny {
            y[b] = tableau.rhs(i).clone();
        }
    }
    let point: Vec<Rational> = subs
        .iter()
        .map(|s| {
            s.columns.iter().fold(s.offset.clone(), |acc, &(c, pos)| {
                if pos {
                    acc + &y[c]
                } else {
                    acc - &y[c]
                }
            })
        })
        .collect();
    if !lp.is_feasible(&point) {
        return internal("simplex returned a point that violates the program");
    }
    let value = lp.value_at(&point);
    Ok(LpOutcome::Optimal { value, point })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        rational(n, d)
    }

    fn cover_lp_tri() -> LinearProgram {
        // Edges ab, bc, ca; one coverage row per vertex.
        let mut lp = LinearProgram::new(vec![integer(1); 3]);
        lp.bounds = vec![Bounds::boxed(integer(0), integer(1)); 3];
        lp.constrain(vec![integer(1), integer(0), integer(1)], Relation::Ge, integer(1));
        lp.constrain(vec![integer(1), integer(1), integer(0)], Relation::Ge, integer(1));
        lp.constrain(vec![integer(0), integer(1), integer(1)], Relation::Ge, integer(1));
        lp
    }

    #[test]
    fn triangle_cover() {
        let out = solve_min(&cover_lp_tri()).unwrap();
        assert_eq!(out, LpOutcome::Optimal { value: r(3, 2), point: vec![r(1, 2); 3] });
    }

    #[test]
    fn no_constraints_gives_zero() {
        let mut lp = LinearProgram::new(vec![integer(1); 4]);
        lp.bounds = vec![Bounds::boxed(integer(0), integer(1)); 4];
        assert_eq!(
            solve_min(&lp).unwrap(),
            LpOutcome::Optimal { value: integer(0), point: vec![integer(0); 4] }
        );
    }

    #[test]
    fn zero_row_is_infeasible() {
        let mut lp = LinearProgram::new(vec![integer(1)]);
        lp.constrain(vec![integer(0)], Relation::Ge, integer(1));
        assert_eq!(solve_min(&lp).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_below() {
        let mut lp = LinearProgram::new(vec![integer(-1), integer(0)]);
        lp.constrain(vec![integer(1), integer(-1)], Relation::Le, integer(3));
        assert_eq!(solve_min(&lp).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn free_and_upper_only_variables() {
        // min x - y, x free with x >= -2 via a row, y <= 5 only.
        let mut lp = LinearProgram::new(vec![integer(1), integer(-1)]);
        lp.bounds = vec![Bounds::free(), Bounds { lower: None, upper: Some(integer(5)) }];
        lp.constrain(vec![integer(1), integer(0)], Relation::Ge, integer(-2));
        match solve_min(&lp).unwrap() {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, integer(-7));
                assert_eq!(point, vec![integer(-2), integer(5)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn equality_rows_and_redundancy() {
        let mut lp = LinearProgram::new(vec![integer(2), integer(3)]);
        lp.constrain(vec![integer(1), integer(1)], Relation::Eq, integer(4));
        lp.constrain(vec![integer(2), integer(2)], Relation::Eq, integer(8));
        assert_eq!(
            solve_min(&lp).unwrap(),
            LpOutcome::Optimal { value: integer(8), point: vec![integer(4), integer(0)] }
        );
    }

    #[test]
    fn dimension_mismatch_is_domain_error() {
        let mut lp = LinearProgram::new(vec![integer(1)]);
        lp.constrain(vec![integer(1), integer(1)], Relation::Ge, integer(1));
        assert!(solve_min(&lp).is_err());
        let mut lp = LinearProgram::new(vec![integer(1)]);
        lp.bounds = vec![Bounds::boxed(integer(2), integer(1))];
        assert!(solve_min(&lp).is_err());
    }

    // Independent oracle: enumerate every vertex of the polytope by solving
    // all n-subsets of tight constraints with Gaussian elimination.
    fn gauss(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
        let n = a.len();
        for col in 0..n {
            let piv = (col..n).find(|&i| !a[i][col].is_zero())?;
            a.swap(col, piv);
            b.swap(col, piv);
            for i in 0..n {
                if i != col && !a[i][col].is_zero() {
                    let f = &a[i][col] / &a[col][col];
                    for j in 0..n {
                        let t = &f * &a[col][j];
                        a[i][j] -= t;
                    }
                    let t = &f * &b[col];
                    b[i] -= t;
                }
            }
        }
        Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
    }

    fn brute_force(lp: &LinearProgram) -> Option<Rational> {
        let n = lp.num_vars();
        let mut planes: Vec<(Vec<Rational>, Rational)> =
            lp.constraints.iter().map(|c| (c.coefficients.clone(), c.rhs.clone())).collect();
        for (j, b) in lp.bounds.iter().enumerate() {
            let mut e = vec![integer(0); n];
            e[j] = integer(1);
            for v in b.lower.iter().chain(b.upper.iter()) {
                planes.push((e.clone(), v.clone()));
            }
        }
        let mut best: Option<Rational> = None;
        let m = planes.len();
        let mut idx: Vec<usize> = (0..n).collect();
        if m < n {
            return None;
        }
        loop {
            let a = idx.iter().map(|&i| planes[i].0.clone()).collect();
            let b = idx.iter().map(|&i| planes[i].1.clone()).collect();
            if let Some(x) = gauss(a, b) {
                if lp.is_feasible(&x) {
                    let v = lp.value_at(&x);
                    if best.as_ref().is_none_or(|b| v < *b) {
                        best = Some(v);
                    }
                }
            }
            // next combination
            let mut i = n;
            loop {
                if i == 0 {
                    return best;
                }
                i -= 1;
                if idx[i] < m - n + i {
                    idx[i] += 1;
                    for j in i + 1..n {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    fn small_lp() -> impl Strategy<Value = LinearProgram> {
        (1usize..=5, 0usize..=6).prop_flat_map(|(n, m)| {
            let coef = -3i64..=3;
            (
                proptest::collection::vec(coef.clone(), n),
                proptest::collection::vec(
                    (proptest::collection::vec(coef.clone(), n), 0u8..3, -4i64..=6, 1i64..=3),
                    m,
                ),
                proptest::collection::vec((0i64..=1, 1i64..=3, 1i64..=2), n),
            )
                .prop_map(move |(obj, cons, bounds)| {
                    let mut lp = LinearProgram::new(obj.into_iter().map(integer).collect());
                    for (a, rel, b, d) in cons {
                        let rel = [Relation::Le, Relation::Ge, Relation::Eq][rel as usize];
                        lp.constrain(a.into_iter().map(integer).collect(), rel, rational(b, d));
                    }
                    lp.bounds = bounds
                        .into_iter()
                        .map(|(lo, hi, d)| Bounds::boxed(integer(lo), rational(lo * d + hi, d)))
                        .collect();
                    lp
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn agrees_with_vertex_enumeration(lp in small_lp()) {
            // Boxed variables: the feasible region is a polytope, so an
            // optimum exists iff it is feasible, and it is attained at a vertex.
            let expected = brute_force(&lp);
            match solve_min(&lp).unwrap() {
                LpOutcome::Optimal { value, point } => {
                    prop_assert!(lp.is_feasible(&point));
                    prop_assert_eq!(Some(value), expected);
                }
                LpOutcome::Infeasible => prop_assert_eq!(expected, None),
                LpOutcome::Unbounded => prop_assert!(false, "boxed program reported unbounded"),
            }
        }
    }
}

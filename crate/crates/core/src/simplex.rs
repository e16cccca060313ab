//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Feasibility of an open sign region and triviality of its recession cone
//! must not depend on floating-point tolerances, so every pivot here is
//! exact. Problems are tiny (a few dozen columns), variables are free, and
//! the only consumers are the arrangement census and its witnesses.
//!
//! The optimizer supports an early-exit goal: region classification only
//! needs to know whether the optimum is positive, so the search can stop at
//! the first basic solution whose objective exceeds the goal.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar used by the arrangement machinery.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// Maximize `objective · x` over free variables `x` subject to
/// `row · x REL rhs` constraints.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub n_vars: usize,
    pub objective: Vec<Rational>,
    pub rows: Vec<(Vec<Rational>, Relation, Rational)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rational, point: Vec<Rational> },
    /// Early exit: a feasible point whose objective exceeds the goal.
    GoalReached { value: Rational, point: Vec<Rational> },
    Unbounded,
    Infeasible,
}

impl LpOutcome {
    /// The optimum (or a witness value past the goal) is strictly positive.
    pub fn is_positive(&self) -> bool {
        match self {
            LpOutcome::Optimal { value, .. } | LpOutcome::GoalReached { value, .. } => {
                value > &Rational::zero()
            }
            LpOutcome::Unbounded => true,
            LpOutcome::Infeasible => false,
        }
    }

    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { point, .. } | LpOutcome::GoalReached { point, .. } => {
                Some(point)
            }
            _ => None,
        }
    }
}

struct Tableau {
    /// `rows × (ncols + 1)`; the last column is the right-hand side.
    t: Vec<Vec<Rational>>,
    /// Reduced-cost row for the active objective; last cell holds the
    /// current objective value.
    cost: Vec<Rational>,
    basis: Vec<usize>,
    ncols: usize,
    /// Columns at or past this index (the artificials) may never enter the
    /// basis; once they leave they are gone for good.
    enter_limit: usize,
}

impl Tableau {
    /// Bland's rule: smallest-index improving column, smallest-index tie
    /// break on the leaving variable. Returns false at optimality.
    fn pivot_step(&mut self) -> Result<bool, ()> {
        let Some(enter) = (0..self.enter_limit).find(|&j| self.cost[j] > Rational::zero()) else {
            return Ok(false);
        };
        let mut leave: Option<(usize, Rational)> = None;
        for (i, row) in self.t.iter().enumerate() {
            if row[enter] > Rational::zero() {
                let ratio = &row[self.ncols] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            return Err(()); // unbounded in the enter direction
        };
        self.pivot(r, enter);
        Ok(true)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let pivot = self.t[r][c].clone();
        for v in self.t[r].iter_mut() {
            *v /= &pivot;
        }
        for i in 0..self.t.len() {
            if i == r {
                continue;
            }
            let factor = self.t[i][c].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..=self.ncols {
                let delta = &factor * &self.t[r][j];
                self.t[i][j] -= delta;
            }
        }
        let factor = self.cost[c].clone();
        if !factor.is_zero() {
            for j in 0..=self.ncols {
                let delta = &factor * &self.t[r][j];
                self.cost[j] -= delta;
            }
        }
        self.basis[r] = c;
    }

    /// Rebuild the reduced-cost row for objective `c` from scratch.
    fn set_objective(&mut self, c: &[Rational]) {
        self.cost = vec![Rational::zero(); self.ncols + 1];
        self.cost[..c.len()].clone_from_slice(c);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = if b < c.len() { c[b].clone() } else { Rational::zero() };
            if cb.is_zero() {
                continue;
            }
            for j in 0..=self.ncols {
                let delta = &cb * &self.t[i][j];
                self.cost[j] -= delta;
            }
        }
    }

    /// Current objective value (the cost row stores its negative).
    fn objective_value(&self) -> Rational {
        -self.cost[self.ncols].clone()
    }
}

/// Maximize, optionally stopping as soon as the objective exceeds `goal`.
pub fn maximize(lp: &LinearProgram, goal: Option<&Rational>) -> LpOutcome {
    let n = lp.n_vars;
    let m = lp.rows.len();
    // Free variables split into positive and negative parts.
    let split = 2 * n;
    let n_slack = lp
        .rows
        .iter()
        .filter(|(_, rel, _)| *rel != Relation::Eq)
        .count();
    // Every row gets an artificial; rows that keep their slack basic could
    // skip theirs, but uniformity keeps the bookkeeping simple.
    let n_art = m;
    let ncols = split + n_slack + n_art;

    let mut t = vec![vec![Rational::zero(); ncols + 1]; m];
    let mut basis = vec![0usize; m];
    let mut slack_at = 0usize;
    for (i, (coeffs, rel, rhs)) in lp.rows.iter().enumerate() {
        assert_eq!(coeffs.len(), n);
        let flip = rhs < &Rational::zero();
        let sgn = if flip { -Rational::one() } else { Rational::one() };
        for (k, a) in coeffs.iter().enumerate() {
            t[i][2 * k] = &sgn * a;
            t[i][2 * k + 1] = -(&sgn * a);
        }
        t[i][ncols] = rhs.abs();
        let rel = match (rel, flip) {
            (Relation::Eq, _) => Relation::Eq,
            (Relation::Le, false) | (Relation::Ge, true) => Relation::Le,
            (Relation::Ge, false) | (Relation::Le, true) => Relation::Ge,
        };
        match rel {
            Relation::Le => {
                t[i][split + slack_at] = Rational::one();
                slack_at += 1;
            }
            Relation::Ge => {
                t[i][split + slack_at] = -Rational::one();
                slack_at += 1;
            }
            Relation::Eq => {}
        }
        // Artificial variable starts basic.
        t[i][split + n_slack + i] = Rational::one();
        basis[i] = split + n_slack + i;
    }

    let mut tab = Tableau { t, cost: Vec::new(), basis, ncols, enter_limit: split + n_slack };

    // Phase 1: maximize minus the sum of artificials.
    let mut phase1 = vec![Rational::zero(); ncols];
    for j in (split + n_slack)..ncols {
        phase1[j] = -Rational::one();
    }
    tab.set_objective(&phase1);
    loop {
        match tab.pivot_step() {
            Ok(true) => {}
            Ok(false) => break,
            Err(()) => unreachable!("phase-1 objective is bounded above by zero"),
        }
    }
    if tab.objective_value() < Rational::zero() {
        return LpOutcome::Infeasible;
    }
    // Drive leftover basic artificials out; a row where that is impossible
    // is redundant and harmless (the artificial stays basic at level zero).
    for i in 0..m {
        if tab.basis[i] >= split + n_slack {
            if let Some(c) = (0..split + n_slack).find(|&j| !tab.t[i][j].is_zero()) {
                tab.pivot(i, c);
            }
        }
    }

    // Phase 2 with the real objective; the enter limit keeps the artificial
    // columns out of the basis for good.
    let mut phase2 = vec![Rational::zero(); ncols];
    for k in 0..n {
        phase2[2 * k] = lp.objective[k].clone();
        phase2[2 * k + 1] = -lp.objective[k].clone();
    }
    tab.set_objective(&phase2);

    let extract = |tab: &Tableau| -> Vec<Rational> {
        let mut x = vec![Rational::zero(); n];
        for (i, &b) in tab.basis.iter().enumerate() {
            if b < split {
                let v = tab.t[i][tab.ncols].clone();
                if b % 2 == 0 {
                    x[b / 2] += v;
                } else {
                    x[b / 2] -= v;
                }
            }
        }
        x
    };

    loop {
        if let Some(g) = goal {
            let value = tab.objective_value();
            if &value > g {
                return LpOutcome::GoalReached { value, point: extract(&tab) };
            }
        }
        match tab.pivot_step() {
            Ok(true) => {}
            Ok(false) => {
                return LpOutcome::Optimal { value: tab.objective_value(), point: extract(&tab) }
            }
            Err(()) => return LpOutcome::Unbounded,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn bounded_optimum_is_exact() {
        // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x >= 0, y >= 0.
        let lp = LinearProgram {
            n_vars: 2,
            objective: vec![rat(3), rat(2)],
            rows: vec![
                (vec![rat(1), rat(1)], Relation::Le, rat(4)),
                (vec![rat(1), rat(3)], Relation::Le, rat(6)),
                (vec![rat(1), rat(0)], Relation::Ge, rat(0)),
                (vec![rat(0), rat(1)], Relation::Ge, rat(0)),
            ],
        };
        match maximize(&lp, None) {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, rat(12));
                assert_eq!(point, vec![rat(4), rat(0)]);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn fractional_optimum() {
        // max x + y s.t. 2x + y <= 1, x + 2y <= 1, x, y >= 0: optimum 2/3 at (1/3, 1/3).
        let lp = LinearProgram {
            n_vars: 2,
            objective: vec![rat(1), rat(1)],
            rows: vec![
                (vec![rat(2), rat(1)], Relation::Le, rat(1)),
                (vec![rat(1), rat(2)], Relation::Le, rat(1)),
                (vec![rat(1), rat(0)], Relation::Ge, rat(0)),
                (vec![rat(0), rat(1)], Relation::Ge, rat(0)),
            ],
        };
        match maximize(&lp, None) {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, r(2, 3));
                assert_eq!(point, vec![r(1, 3), r(1, 3)]);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn infeasible_detected() {
        let lp = LinearProgram {
            n_vars: 1,
            objective: vec![rat(1)],
            rows: vec![
                (vec![rat(1)], Relation::Ge, rat(1)),
                (vec![rat(1)], Relation::Le, rat(0)),
            ],
        };
        assert_eq!(maximize(&lp, None), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        // Free variable, only a lower bound, maximize it.
        let lp = LinearProgram {
            n_vars: 1,
            objective: vec![rat(1)],
            rows: vec![(vec![rat(1)], Relation::Ge, rat(0))],
        };
        assert_eq!(maximize(&lp, None), LpOutcome::Unbounded);
    }

    #[test]
    fn equality_constraints_and_free_variables() {
        // x + y = 1; maximize -x² style cannot be expressed, so check a
        // linear one: max y s.t. x + y = 1, x >= -2 gives y <= 3.
        let lp = LinearProgram {
            n_vars: 2,
            objective: vec![rat(0), rat(1)],
            rows: vec![
                (vec![rat(1), rat(1)], Relation::Eq, rat(1)),
                (vec![rat(1), rat(0)], Relation::Ge, rat(-2)),
            ],
        };
        match maximize(&lp, None) {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, rat(3));
                assert_eq!(point, vec![rat(-2), rat(3)]);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn negative_rhs_rows_are_normalized() {
        // -x <= -1 (i.e. x >= 1), x <= 3: max -x should give -1... maximize
        // negative direction: objective -x, optimum at x = 1.
        let lp = LinearProgram {
            n_vars: 1,
            objective: vec![rat(-1)],
            rows: vec![
                (vec![rat(-1)], Relation::Le, rat(-1)),
                (vec![rat(1)], Relation::Le, rat(3)),
            ],
        };
        match maximize(&lp, None) {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, rat(-1));
                assert_eq!(point, vec![rat(1)]);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn goal_mode_exits_early_with_witness() {
        let lp = LinearProgram {
            n_vars: 2,
            objective: vec![rat(1), rat(1)],
            rows: vec![
                (vec![rat(1), rat(0)], Relation::Ge, rat(0)),
                (vec![rat(0), rat(1)], Relation::Ge, rat(0)),
                (vec![rat(1), rat(1)], Relation::Le, rat(10)),
            ],
        };
        let zero = Rational::zero();
        match maximize(&lp, Some(&zero)) {
            LpOutcome::GoalReached { value, point } => {
                assert!(value > zero);
                assert!(&point[0] + &point[1] <= rat(10));
            }
            LpOutcome::Optimal { value, .. } => assert!(value > zero),
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Classic degeneracy: several redundant constraints through origin.
        let lp = LinearProgram {
            n_vars: 2,
            objective: vec![rat(1), rat(2)],
            rows: vec![
                (vec![rat(1), rat(1)], Relation::Le, rat(0)),
                (vec![rat(2), rat(2)], Relation::Le, rat(0)),
                (vec![rat(1), rat(-1)], Relation::Le, rat(0)),
                (vec![rat(-1), rat(0)], Relation::Le, rat(0)),
                (vec![rat(0), rat(-1)], Relation::Le, rat(1)),
            ],
        };
        match maximize(&lp, None) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, rat(0)),
            other => panic!("unexpected outcome {other:?}"),
        }
    }
}

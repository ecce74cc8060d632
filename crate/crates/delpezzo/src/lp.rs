//! Exact rational linear-programming kernel.
//!
//! Feasibility of `A x = b, x >= lower` is decided by a phase-1 simplex with
//! Bland's anti-cycling pivot rule, entirely over `Rat`. The systems solved
//! here are tiny (at most a dozen constraint rows and a few dozen columns),
//! so a dense tableau is the right tool. Verdicts are deterministic and
//! reproducible bit for bit.

use num_traits::{One, Signed, Zero};

use crate::num::Rat;

/// `A x = b` with per-variable lower bounds `x_j >= lower_j`.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub a: Vec<Vec<Rat>>,
    pub b: Vec<Rat>,
    pub lower: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Feasible(Vec<Rat>),
    Infeasible,
}

impl LpProblem {
    pub fn new(a: Vec<Vec<Rat>>, b: Vec<Rat>) -> Self {
        let n = a.first().map_or(0, Vec::len);
        LpProblem {
            a,
            b,
            lower: vec![Rat::zero(); n],
        }
    }

    pub fn with_lower(mut self, lower: Vec<Rat>) -> Self {
        self.lower = lower;
        self
    }

    pub fn num_vars(&self) -> usize {
        self.lower.len()
    }
}

/// Decides feasibility and returns an exact feasible point if one exists.
pub fn lp_solve(problem: &LpProblem) -> LpOutcome {
    let m = problem.a.len();
    let n = problem.num_vars();
    debug_assert_eq!(problem.b.len(), m);
    debug_assert!(problem.a.iter().all(|row| row.len() == n));

    // Shift to y = x - lower, y >= 0.
    let mut rhs: Vec<Rat> = (0..m)
        .map(|i| {
            let shift: Rat = (0..n).map(|j| &problem.a[i][j] * &problem.lower[j]).sum();
            &problem.b[i] - shift
        })
        .collect();
    let mut rows: Vec<Vec<Rat>> = problem.a.clone();
    for i in 0..m {
        if rhs[i].is_negative() {
            rhs[i] = -rhs[i].clone();
            for v in rows[i].iter_mut() {
                *v = -v.clone();
            }
        }
    }

    // Tableau with one artificial variable per row; phase-1 minimizes their sum.
    let ncols = n + m;
    let mut t: Vec<Vec<Rat>> = (0..m)
        .map(|i| {
            let mut row = rows[i].clone();
            row.extend((0..m).map(|k| if k == i { Rat::one() } else { Rat::zero() }));
            row.push(rhs[i].clone());
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..ncols).collect();
    let mut obj: Vec<Rat> = vec![Rat::zero(); ncols + 1];
    for j in 0..n {
        obj[j] = -(0..m).map(|i| t[i][j].clone()).sum::<Rat>();
    }
    obj[ncols] = -rhs.iter().cloned().sum::<Rat>();

    // Bland: entering column = lowest index with negative reduced cost.
    while let Some(enter) = (0..ncols).find(|&j| obj[j].is_negative()) {
        // Ratio test; ties broken by smallest basic-variable index (Bland).
        let mut leave: Option<usize> = None;
        let mut best: Option<Rat> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][ncols] / &t[i][enter];
                let better = match &best {
                    None => true,
                    Some(b) => &ratio < b || (&ratio == b && basis[i] < basis[leave.unwrap()]),
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            // Phase-1 objective is bounded below by zero; no positive entry
            // in the entering column would mean an unbounded descent.
            unreachable!("phase-1 simplex cannot be unbounded");
        };
        pivot(&mut t, &mut obj, r, enter);
        basis[r] = enter;
    }

    if !obj[ncols].is_zero() {
        return LpOutcome::Infeasible;
    }

    let mut y = vec![Rat::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            y[bv] = t[i][ncols].clone();
        }
        // A basic artificial at optimum has value zero and can be ignored.
    }
    let x: Vec<Rat> = (0..n).map(|j| &y[j] + &problem.lower[j]).collect();
    debug_assert!(check_feasible(problem, &x));
    LpOutcome::Feasible(x)
}

#[allow(clippy::needless_range_loop)] // row updates read the pivot row in place
fn pivot(t: &mut [Vec<Rat>], obj: &mut [Rat], r: usize, c: usize) {
    let inv = t[r][c].clone();
    for v in t[r].iter_mut() {
        *v = &*v / &inv;
    }
    let ncols = obj.len() - 1;
    for i in 0..t.len() {
        if i != r && !t[i][c].is_zero() {
            let f = t[i][c].clone();
            for j in 0..=ncols {
                let delta = &f * &t[r][j];
                t[i][j] = &t[i][j] - delta;
            }
        }
    }
    if !obj[c].is_zero() {
        let f = obj[c].clone();
        for j in 0..=ncols {
            let delta = &f * &t[r][j];
            obj[j] = &obj[j] - delta;
        }
    }
}

/// Exact check that `x` satisfies the problem constraints.
pub fn check_feasible(problem: &LpProblem, x: &[Rat]) -> bool {
    if x.len() != problem.num_vars() {
        return false;
    }
    if x.iter().zip(&problem.lower).any(|(v, l)| v < l) {
        return false;
    }
    problem.a.iter().zip(&problem.b).all(|(row, b)| {
        let lhs: Rat = row.iter().zip(x).map(|(a, v)| a * v).sum();
        &lhs == b
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{rat, rat_int};

    fn rv(vals: &[i64]) -> Vec<Rat> {
        vals.iter().map(|&v| rat_int(v)).collect()
    }

    #[test]
    fn simple_feasible() {
        // x >= 0, x1 + x2 = 1.
        let p = LpProblem::new(vec![rv(&[1, 1])], rv(&[1]));
        match lp_solve(&p) {
            LpOutcome::Feasible(x) => {
                assert!(check_feasible(&p, &x));
            }
            LpOutcome::Infeasible => panic!("expected feasible"),
        }
    }

    #[test]
    fn simple_infeasible() {
        // x >= 0, x1 = -1.
        let p = LpProblem::new(vec![rv(&[1, 0])], rv(&[-1]));
        assert_eq!(lp_solve(&p), LpOutcome::Infeasible);
    }

    #[test]
    fn lower_bounds_shift() {
        // x1 + x2 = 1 with x >= 1 is infeasible; with x >= 1/2 it is tight.
        let a = vec![rv(&[1, 1])];
        let p = LpProblem::new(a.clone(), rv(&[1])).with_lower(rv(&[1, 1]));
        assert_eq!(lp_solve(&p), LpOutcome::Infeasible);
        let p = LpProblem::new(a, rv(&[1])).with_lower(vec![rat(1, 2), rat(1, 2)]);
        match lp_solve(&p) {
            LpOutcome::Feasible(x) => assert!(check_feasible(&p, &x)),
            LpOutcome::Infeasible => panic!("expected feasible"),
        }
    }

    #[test]
    fn redundant_and_inconsistent_rows() {
        let p = LpProblem::new(vec![rv(&[1, 2]), rv(&[2, 4])], rv(&[3, 6]));
        assert!(matches!(lp_solve(&p), LpOutcome::Feasible(_)));
        let p = LpProblem::new(vec![rv(&[1, 2]), rv(&[2, 4])], rv(&[3, 7]));
        assert_eq!(lp_solve(&p), LpOutcome::Infeasible);
    }
}

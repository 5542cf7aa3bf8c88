//! Dense two-phase simplex for small linear programs
//!
//! ```text
//!     maximize    cᵀy
//!     subject to  A y = b,   y_i ≥ 0 for masked i
//! ```
//!
//! Bland's rule is used for both the entering and leaving variable, so the
//! method cannot cycle. Problems here have at most a few dozen columns.

use crate::error::{input, Error, Result};
use crate::linalg::Matrix;

const PIVOT_EPS: f64 = 1e-10;
const FEAS_EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub optimum: f64,
    /// An optimal basic solution in the original variables.
    pub solution: Vec<f64>,
}

struct Tableau {
    /// rows × (cols + 1); last column is the right-hand side
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.t[i][self.cols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (v, pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                r[col] = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Maximizes `cost · x` over columns `j < allowed`. Returns `Err(Unbounded)`
    /// when an improving column has no positive entry.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<()> {
        let max_iter = 50_000;
        for _ in 0..max_iter {
            let reduced = |j: usize| -> f64 {
                cost[j] - self.basis.iter().enumerate().map(|(i, &b)| cost[b] * self.t[i][j]).sum::<f64>()
            };
            let Some(enter) = (0..allowed).find(|&j| !self.basis.contains(&j) && reduced(j) > PIVOT_EPS) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.t.len() {
                let a = self.t[i][enter];
                if a > PIVOT_EPS {
                    let ratio = self.rhs(i) / a;
                    let better = match leave {
                        None => true,
                        Some((l, r)) => ratio < r - 1e-14 || (ratio <= r + 1e-14 && self.basis[i] < self.basis[l]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, _)) = leave else {
                return Err(Error::Unbounded);
            };
            self.pivot(row, enter);
        }
        Err(Error::NumericalFailure("simplex iteration limit reached".into()))
    }
}

/// Solves `max cᵀy s.t. A y = b, y_i ≥ 0 where nonneg[i]`.
pub fn lp_solve(c: &[f64], a_eq: &Matrix, b_eq: &[f64], nonneg: &[bool]) -> Result<LpSolution> {
    let n = c.len();
    let m = a_eq.rows();
    if a_eq.cols() != n || b_eq.len() != m || nonneg.len() != n {
        return Err(input(format!(
            "inconsistent LP dimensions: c has {n}, A is {}x{}, b has {}, mask has {}",
            m,
            a_eq.cols(),
            b_eq.len(),
            nonneg.len()
        )));
    }
    if c.iter().chain(b_eq).any(|v| !v.is_finite()) || !a_eq.max_abs().is_finite() {
        return Err(input("LP data has non-finite entries"));
    }

    // split free variables into positive and negative parts
    let mut columns: Vec<(usize, f64)> = Vec::new();
    for (j, &nn) in nonneg.iter().enumerate() {
        columns.push((j, 1.0));
        if !nn {
            columns.push((j, -1.0));
        }
    }
    let nc = columns.len();
    let total = nc + m;
    let mut t = vec![vec![0.0; total + 1]; m];
    for i in 0..m {
        let sign = if b_eq[i] < 0.0 { -1.0 } else { 1.0 };
        for (k, &(j, s)) in columns.iter().enumerate() {
            t[i][k] = sign * s * a_eq[(i, j)];
        }
        t[i][nc + i] = 1.0;
        t[i][total] = sign * b_eq[i];
    }
    let mut tab = Tableau { t, basis: (nc..total).collect(), cols: total };

    // phase 1: drive the artificials to zero
    let mut phase1 = vec![0.0; total];
    phase1[nc..].iter_mut().for_each(|v| *v = -1.0);
    tab.optimize(&phase1, total)?;
    let infeasibility: f64 = (0..m).filter(|&i| tab.basis[i] >= nc).map(|i| tab.rhs(i)).sum();
    let b_scale = 1.0 + b_eq.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if infeasibility > FEAS_EPS * b_scale {
        return Err(Error::Infeasible);
    }
    // pivot remaining artificials out; rows that cannot be pivoted are redundant
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= nc {
            if let Some(j) = (0..nc).find(|&j| tab.t[i][j].abs() > PIVOT_EPS) {
                tab.pivot(i, j);
                i += 1;
            } else {
                tab.t.remove(i);
                tab.basis.remove(i);
            }
        } else {
            i += 1;
        }
    }

    let mut cost = vec![0.0; total];
    for (k, &(j, s)) in columns.iter().enumerate() {
        cost[k] = s * c[j];
    }
    tab.optimize(&cost, nc)?;

    let mut split = vec![0.0; nc];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < nc {
            split[b] = tab.rhs(i);
        }
    }
    let mut solution = vec![0.0; n];
    for (k, &(j, s)) in columns.iter().enumerate() {
        solution[j] += s * split[k];
    }
    let optimum = c.iter().zip(&solution).map(|(a, b)| a * b).sum();
    Ok(LpSolution { optimum, solution })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_variable() {
        let a = Matrix::from_rows(&[vec![1.0]]).unwrap();
        let s = lp_solve(&[1.0], &a, &[1.0], &[true]).unwrap();
        assert_eq!(s.optimum, 1.0);
        assert_eq!(s.solution, vec![1.0]);
    }

    #[test]
    fn simplex_constraint() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let s = lp_solve(&[1.0, 1.0], &a, &[1.0], &[true, true]).unwrap();
        assert!((s.optimum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = Matrix::from_rows(&[vec![1.0]]).unwrap();
        assert_eq!(lp_solve(&[1.0], &a, &[-1.0], &[true]), Err(Error::Infeasible));
        let a = Matrix::from_rows(&[vec![1.0, -1.0]]).unwrap();
        assert_eq!(lp_solve(&[1.0, 0.0], &a, &[0.0], &[true, true]), Err(Error::Unbounded));
    }

    #[test]
    fn free_variables() {
        // max y0 s.t. y0 + y1 = -2, y1 >= 0, y0 free -> y0 = -2
        let a = Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let s = lp_solve(&[1.0, 0.0], &a, &[-2.0], &[false, true]).unwrap();
        assert!((s.optimum + 2.0).abs() < 1e-12);
        assert!((s.solution[0] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_rows() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        let s = lp_solve(&[1.0, 2.0], &a, &[1.0, 2.0], &[true, true]).unwrap();
        assert!((s.optimum - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // a classic cycling example for the largest-coefficient rule
        let a = Matrix::from_rows(&[
            vec![0.5, -5.5, -2.5, 9.0, 1.0, 0.0, 0.0],
            vec![0.5, -1.5, -0.5, 1.0, 0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        let s = lp_solve(&[10.0, -57.0, -9.0, -24.0, 0.0, 0.0, 0.0], &a, &[0.0, 0.0, 1.0], &[true; 7]).unwrap();
        assert!((s.optimum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dimension_mismatch() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        assert!(matches!(lp_solve(&[1.0], &a, &[1.0], &[true]), Err(Error::Input(_))));
    }
}

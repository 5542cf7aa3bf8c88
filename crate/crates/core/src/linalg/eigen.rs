use super::{Matrix, SymMatrix};
use crate::error::{input, Error, Result};

const OFF_DIAGONAL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with an orthonormal basis of
/// eigenvectors stored column-wise.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub basis: Matrix,
}

impl Spectrum {
    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        self.basis.column(k)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Eigendecomposition by cyclic Jacobi rotations.
///
/// Sweeps visit `(p, q)` pairs in row-major order, so the result is a
/// deterministic function of the input. Iteration stops once every
/// off-diagonal magnitude is at most `1e-12 · ‖M‖_max`. Eigenvector signs are
/// fixed so that the first non-negligible component is positive.
pub fn sym_eigen(m: &SymMatrix) -> Result<Spectrum> {
    if !m.is_finite() {
        return Err(input("matrix has non-finite entries"));
    }
    let n = m.order();
    let mut a = m.to_dense();
    let mut v = Matrix::identity(n);
    let threshold = OFF_DIAGONAL_TOL * m.max_abs();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off =
            (0..n).flat_map(|p| (p + 1..n).map(move |q| (p, q))).fold(0.0_f64, |acc, (p, q)| acc.max(a[(p, q)].abs()));
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= threshold {
                    continue;
                }
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NumericalFailure(format!("Jacobi iteration did not converge in {MAX_SWEEPS} sweeps")));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let eigenvalues = order.iter().map(|&i| a[(i, i)]).collect();
    let mut basis = Matrix::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        let col = v.column(src);
        let sign = col.iter().find(|c| c.abs() > 1e-12).map_or(1.0, |c| c.signum());
        for i in 0..n {
            basis[(i, k)] = sign * col[i];
        }
    }
    Ok(Spectrum { eigenvalues, basis })
}

/// One Jacobi rotation annihilating `a[(p, q)]`; `v` accumulates the rotations.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let n = a.rows();
    let apq = a[(p, q)];
    let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
    let t = if tau.abs() > 1e150 { 0.5 / tau } else { tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt()) };
    // tau == 0 gives signum 1.0, i.e. a 45 degree rotation
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        let new_p = c * akp - s * akq;
        let new_q = s * akp + c * akq;
        a[(k, p)] = new_p;
        a[(p, k)] = new_p;
        a[(k, q)] = new_q;
        a[(q, k)] = new_q;
    }
    a[(p, p)] -= t * apq;
    a[(q, q)] += t * apq;
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

pub fn min_eigenvalue(m: &SymMatrix) -> Result<f64> {
    Ok(sym_eigen(m)?.min())
}

#[derive(Clone, Debug, PartialEq)]
pub enum PsdVerdict {
    Psd {
        lambda_min: f64,
    },
    /// `witness` is a unit vector with `witnessᵀ M witness = value`.
    NotPsd {
        witness: Vec<f64>,
        value: f64,
    },
}

impl PsdVerdict {
    pub fn is_psd(&self) -> bool {
        matches!(self, PsdVerdict::Psd { .. })
    }
}

/// PSD test with threshold `tol · (1 + ‖M‖_max)` on the smallest eigenvalue.
pub fn is_psd(m: &SymMatrix, tol: f64) -> Result<PsdVerdict> {
    if !(tol >= 0.0) {
        return Err(input("tolerance must be non-negative"));
    }
    let spectrum = sym_eigen(m)?;
    let lambda_min = spectrum.min();
    if lambda_min >= -tol * (1.0 + m.max_abs()) {
        Ok(PsdVerdict::Psd { lambda_min })
    } else {
        Ok(PsdVerdict::NotPsd { witness: spectrum.eigenvector(0), value: lambda_min })
    }
}

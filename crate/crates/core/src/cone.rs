//! First-order cones: a linear subspace plus at most one ray.
//!
//! Quadratic forms are even (`q(-x) = q(x)`), so a form is nonnegative on a
//! first-order cone exactly when it is nonnegative on the cone's linear span.
//! Every cone-restricted check therefore goes through [`restrict`] applied to
//! [`FirstOrderCone::span_basis`]; the ray matters only for membership.

use crate::error::{input, Result};
use crate::linalg::{axpy, dot, norm, orthonormalize, Matrix, SymMatrix};

/// Orthogonal component of a ray below this magnitude folds into the subspace.
pub const RAY_ABSORB_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct FirstOrderCone {
    ambient_dim: usize,
    subspace: Vec<Vec<f64>>,
    ray: Option<Vec<f64>>,
}

impl FirstOrderCone {
    /// The whole space `ℝⁿ`.
    pub fn full(n: usize) -> Self {
        let subspace = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        FirstOrderCone { ambient_dim: n, subspace, ray: None }
    }

    /// `span(subspace) ⊕ {t·ray : t ≥ 0}`. The spanning vectors need not be
    /// orthonormal or independent.
    pub fn new(n: usize, subspace: &[Vec<f64>], ray: Option<&[f64]>) -> Result<Self> {
        if n == 0 {
            return Err(input("cone ambient dimension must be positive"));
        }
        for (i, v) in subspace.iter().enumerate() {
            if v.len() != n {
                return Err(input(format!("subspace vector {i} has length {} (expected {n})", v.len())));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(input(format!("subspace vector {i} has non-finite entries")));
            }
        }
        let basis = orthonormalize(subspace, 1e-10);
        let ray = match ray {
            None => None,
            Some(d) => {
                if d.len() != n {
                    return Err(input(format!("ray has length {} (expected {n})", d.len())));
                }
                if d.iter().any(|x| !x.is_finite()) {
                    return Err(input("ray has non-finite entries"));
                }
                let nd = norm(d);
                if nd == 0.0 {
                    None
                } else {
                    let mut r: Vec<f64> = d.iter().map(|x| x / nd).collect();
                    for _ in 0..2 {
                        for q in &basis {
                            let c = dot(q, &r);
                            axpy(-c, q, &mut r);
                        }
                    }
                    let nr = norm(&r);
                    (nr >= RAY_ABSORB_TOL).then(|| r.into_iter().map(|x| x / nr).collect())
                }
            }
        };
        Ok(FirstOrderCone { ambient_dim: n, subspace: basis, ray })
    }

    pub fn subspace(n: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        Self::new(n, vectors, None)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Orthonormal basis of the subspace part.
    pub fn subspace_basis(&self) -> &[Vec<f64>] {
        &self.subspace
    }

    /// Unit ray direction orthogonal to the subspace, if any.
    pub fn ray(&self) -> Option<&[f64]> {
        self.ray.as_deref()
    }

    /// Dimension of the linear span of the cone.
    pub fn span_dim(&self) -> usize {
        self.subspace.len() + usize::from(self.ray.is_some())
    }

    /// Orthonormal basis of `V ⊕ span(d₀)` as an `n × k` matrix.
    pub fn span_basis(&self) -> Matrix {
        let mut cols = self.subspace.clone();
        if let Some(r) = &self.ray {
            cols.push(r.clone());
        }
        Matrix::from_columns(self.ambient_dim, &cols).expect("cone vectors have ambient length")
    }

    /// Maps span coordinates to an ambient vector.
    pub fn embed(&self, coords: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.ambient_dim];
        for (c, q) in coords.iter().zip(self.subspace.iter().chain(self.ray.iter())) {
            axpy(*c, q, &mut x);
        }
        x
    }
}

/// `Bᵀ M B`. `M` is PSD on `span(B)` iff the result is PSD.
pub fn restrict(m: &SymMatrix, basis: &Matrix) -> Result<SymMatrix> {
    if basis.rows() != m.order() {
        return Err(input(format!("basis has {} rows but matrix has order {}", basis.rows(), m.order())));
    }
    let k = basis.cols();
    if k == 0 {
        return Err(input("cannot restrict to a zero-dimensional subspace"));
    }
    let cols = basis.columns();
    let images: Vec<Vec<f64>> = cols.iter().map(|c| m.mul_vec(c)).collect();
    Ok(SymMatrix::from_upper_fn(k, |i, j| dot(&cols[i], &images[j])))
}

/// Restriction to the span of `cone`, or `None` when the cone is `{0}`.
pub fn restrict_to_cone(m: &SymMatrix, cone: &FirstOrderCone) -> Result<Option<SymMatrix>> {
    if m.order() != cone.ambient_dim() {
        return Err(input(format!("matrix order {} differs from cone dimension {}", m.order(), cone.ambient_dim())));
    }
    if cone.span_dim() == 0 {
        return Ok(None);
    }
    restrict(m, &cone.span_basis()).map(Some)
}

/// Whether `x` lies in `cone`: the part of `x` outside the span has norm at
/// most `tol`, and the ray coordinate is at least `-tol`.
pub fn cone_contains(cone: &FirstOrderCone, x: &[f64], tol: f64) -> bool {
    if x.len() != cone.ambient_dim {
        return false;
    }
    let mut r = x.to_vec();
    for q in &cone.subspace {
        let c = dot(q, x);
        axpy(-c, q, &mut r);
    }
    if let Some(d) = &cone.ray {
        let c = dot(d, x);
        if c < -tol {
            return false;
        }
        axpy(-c, d, &mut r);
    }
    norm(&r) <= tol
}

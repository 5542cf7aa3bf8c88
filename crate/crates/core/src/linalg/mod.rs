//! Dense symmetric linear algebra: storage, eigendecomposition, PSD tests and
//! the rank of a set of matrices.

mod eigen;
mod rank;

pub use eigen::{is_psd, min_eigenvalue, sym_eigen, PsdVerdict, Spectrum};
pub use rank::{express_in_basis, matrix_set_rank, null_space, numerical_rank, orthonormalize, Dependence, SetRank};

use crate::error::{input, Result};
use std::ops::{Index, IndexMut};

/// Default PSD tolerance, applied relative to `1 + ‖M‖_max`.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest asymmetry `|a_ij - a_ji|` tolerated when building a [`SymMatrix`]
/// from full rows.
pub const SYMMETRY_TOL: f64 = 1e-12;

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// y += a * x
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn max_abs(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Dense row-major real matrix of arbitrary shape.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(input("rows have different lengths"));
        }
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        if data.iter().any(|v| !v.is_finite()) {
            return Err(input("matrix has non-finite entries"));
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    /// Builds an `n × k` matrix whose columns are the given vectors.
    pub fn from_columns(n: usize, columns: &[Vec<f64>]) -> Result<Self> {
        let mut m = Matrix::zeros(n, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(input(format!("column {j} has length {} (expected {n})", col.len())));
            }
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.data)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Real symmetric matrix. Only the upper triangle is stored, so
/// `get(i, j) == get(j, i)` holds exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    order: usize,
    upper: Vec<f64>,
}

#[inline]
fn packed(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    // row i of the packed upper triangle starts at sum_{r<i} (n - r)
    i * (2 * n - i + 1) / 2 + (j - i)
}

impl SymMatrix {
    /// Zero matrix of order `n`. Panics if `n == 0`.
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix order must be positive");
        SymMatrix { order: n, upper: vec![0.0; n * (n + 1) / 2] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![1.0; n])
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m.set(i, i, *v);
        }
        m
    }

    /// Builds from a function evaluated on the upper triangle (`i <= j`).
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds from full rows, rejecting asymmetry above [`SYMMETRY_TOL`]
    /// (relative to `1 + max|a_ij|`) and averaging the two triangles.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dense = Matrix::from_rows(rows)?;
        Self::from_dense(&dense)
    }

    pub fn from_dense(dense: &Matrix) -> Result<Self> {
        let n = dense.rows();
        if n == 0 {
            return Err(input("matrix order must be positive"));
        }
        if !dense.is_square() {
            return Err(input(format!("matrix is {}x{}, expected square", n, dense.cols())));
        }
        let scale = 1.0 + dense.max_abs();
        for i in 0..n {
            for j in i + 1..n {
                let gap = (dense[(i, j)] - dense[(j, i)]).abs();
                if gap > SYMMETRY_TOL * scale {
                    return Err(input(format!(
                        "matrix is not symmetric: entries ({i},{j}) and ({j},{i}) differ by {gap:.3e}"
                    )));
                }
            }
        }
        Ok(Self::from_upper_fn(n, |i, j| 0.5 * (dense[(i, j)] + dense[(j, i)])))
    }

    /// Builds from full rows, reading only the upper triangle.
    pub fn from_upper(rows: &[Vec<f64>]) -> Result<Self> {
        let dense = Matrix::from_rows(rows)?;
        if dense.rows() == 0 || !dense.is_square() {
            return Err(input("expected a non-empty square matrix"));
        }
        Ok(Self::from_upper_fn(dense.rows(), |i, j| dense[(i, j)]))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[packed(self.order, i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = packed(self.order, i, j);
        self.upper[k] = v;
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.upper)
    }

    pub fn is_finite(&self) -> bool {
        self.upper.iter().all(|v| v.is_finite())
    }

    pub fn to_dense(&self) -> Matrix {
        let n = self.order;
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.get(i, j);
            }
        }
        m
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.to_dense().to_rows()
    }

    pub fn scaled(&self, c: f64) -> SymMatrix {
        SymMatrix { order: self.order, upper: self.upper.iter().map(|v| c * v).collect() }
    }

    /// self += c * other
    pub fn add_scaled(&mut self, c: f64, other: &SymMatrix) {
        assert_eq!(self.order, other.order, "matrix orders differ");
        axpy(c, &other.upper, &mut self.upper);
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        let mut out = self.clone();
        out.add_scaled(-1.0, other);
        out
    }

    /// `Σ weights[i] · mats[i]`.
    pub fn combination(weights: &[f64], mats: &[SymMatrix]) -> Result<SymMatrix> {
        if weights.len() != mats.len() || mats.is_empty() {
            return Err(input("weights and matrices must be non-empty and of equal count"));
        }
        let n = mats[0].order;
        if mats.iter().any(|m| m.order != n) {
            return Err(input("matrices have different orders"));
        }
        let mut out = SymMatrix::zeros(n);
        for (w, m) in weights.iter().zip(mats) {
            out.add_scaled(*w, m);
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.order;
        (0..n).map(|i| (0..n).map(|j| self.get(i, j) * x[j]).sum()).collect()
    }

    /// Embeds `self` as the leading block of a zero matrix of order `n`.
    pub fn embed(&self, n: usize) -> SymMatrix {
        assert!(n >= self.order);
        let k = self.order;
        SymMatrix::from_upper_fn(n, |i, j| if j < k { self.get(i, j) } else { 0.0 })
    }

    /// Upper triangle with off-diagonal entries scaled by √2, so that the
    /// Euclidean inner product of two flattenings is the trace inner product.
    pub fn flatten(&self) -> Vec<f64> {
        let n = self.order;
        let mut out = Vec::with_capacity(self.upper.len());
        for i in 0..n {
            for j in i..n {
                let v = self.get(i, j);
                out.push(if i == j { v } else { v * std::f64::consts::SQRT_2 });
            }
        }
        out
    }
}

/// `xᵀ M x`.
pub fn quad_form(m: &SymMatrix, x: &[f64]) -> Result<f64> {
    if x.len() != m.order() {
        return Err(input(format!("vector has length {} but matrix has order {}", x.len(), m.order())));
    }
    Ok(quad_form_unchecked(m, x))
}

pub(crate) fn quad_form_unchecked(m: &SymMatrix, x: &[f64]) -> f64 {
    let n = m.order();
    let mut acc = 0.0;
    for i in 0..n {
        acc += m.get(i, i) * x[i] * x[i];
        for j in i + 1..n {
            acc += 2.0 * m.get(i, j) * x[i] * x[j];
        }
    }
    acc
}

/// A square matrix that can take part in a set-rank computation or act as
/// the linear map `x ↦ A x`.
pub trait SquareOperator {
    fn order(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
    /// Vectorization used to define linear independence of matrices.
    fn flatten(&self) -> Vec<f64>;
    fn max_abs(&self) -> f64;
}

impl SquareOperator for SymMatrix {
    fn order(&self) -> usize {
        self.order
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.mul_vec(x)
    }
    fn flatten(&self) -> Vec<f64> {
        SymMatrix::flatten(self)
    }
    fn max_abs(&self) -> f64 {
        SymMatrix::max_abs(self)
    }
}

/// General (possibly non-symmetric) square matrices flatten to all `n²`
/// entries.
impl SquareOperator for Matrix {
    fn order(&self) -> usize {
        self.rows
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.mul_vec(x)
    }
    fn flatten(&self) -> Vec<f64> {
        self.data.clone()
    }
    fn max_abs(&self) -> f64 {
        Matrix::max_abs(self)
    }
}

/// Ordered list of symmetric matrices sharing one order.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFamily {
    members: Vec<SymMatrix>,
}

impl MatrixFamily {
    pub fn new(members: Vec<SymMatrix>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(input("matrix family must have at least one member"));
        };
        let n = first.order();
        if let Some((i, m)) = members.iter().enumerate().find(|(_, m)| m.order() != n) {
            return Err(input(format!("member {i} has order {} (expected {n})", m.order())));
        }
        if members.iter().any(|m| !m.is_finite()) {
            return Err(input("matrix family has non-finite entries"));
        }
        Ok(MatrixFamily { members })
    }

    pub fn members(&self) -> &[SymMatrix] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn order(&self) -> usize {
        self.members[0].order()
    }

    /// `1 + max_i ‖A_i‖_max`, the reference magnitude for relative thresholds.
    pub fn scale(&self) -> f64 {
        1.0 + self.members.iter().fold(0.0_f64, |m, a| m.max(a.max_abs()))
    }

    pub fn subfamily(&self, indices: &[usize]) -> MatrixFamily {
        MatrixFamily { members: indices.iter().map(|&i| self.members[i].clone()).collect() }
    }

    pub fn combination(&self, weights: &[f64]) -> Result<SymMatrix> {
        SymMatrix::combination(weights, &self.members)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_storage_is_symmetric() {
        let m = SymMatrix::from_upper_fn(4, |i, j| (10 * i + j) as f64);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
        assert_eq!(m.get(1, 3), 13.0);
        assert_eq!(m.get(3, 3), 33.0);
        assert_eq!(m.get(0, 0), 0.0);
    }

    #[test]
    fn from_rows_rejects_asymmetry() {
        let err = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.5, 1.0]]).unwrap_err();
        assert!(matches!(err, crate::Error::Input(_)));
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).is_ok());
        assert!(SymMatrix::from_rows(&[]).is_err());
        assert!(SymMatrix::from_rows(&[vec![f64::NAN]]).is_err());
    }

    #[test]
    fn quad_form_examples() {
        assert_eq!(quad_form(&SymMatrix::identity(2), &[3.0, 4.0]).unwrap(), 25.0);
        let a1 = SymMatrix::from_diag(&[-1.0, 1.0]);
        assert!((quad_form(&a1, &[1.0, -0.3]).unwrap() + 0.91).abs() < 1e-15);
        let a2 = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, -2.0]]).unwrap();
        assert!((quad_form(&a2, &[1.0, -0.3]).unwrap() + 0.38).abs() < 1e-15);
        assert!(quad_form(&a2, &[1.0]).is_err());
    }

    #[test]
    fn flatten_preserves_trace_inner_product() {
        let a = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, -3.0]]).unwrap();
        let b = SymMatrix::from_rows(&[vec![0.5, -1.0], vec![-1.0, 4.0]]).unwrap();
        let trace: f64 = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| a.get(i, j) * b.get(i, j)).sum();
        assert!((dot(&a.flatten(), &b.flatten()) - trace).abs() < 1e-12);
    }

    #[test]
    fn family_rejects_mixed_orders() {
        let err = MatrixFamily::new(vec![SymMatrix::identity(2), SymMatrix::identity(3)]);
        assert!(err.is_err());
        assert!(MatrixFamily::new(vec![]).is_err());
    }
}

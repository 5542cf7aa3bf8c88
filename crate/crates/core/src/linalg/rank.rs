use super::{axpy, dot, norm, SquareOperator, SymMatrix};
use crate::error::{input, Error, Result};

/// Coordinates of every family member in a two-member basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Dependence {
    pub basis: [usize; 2],
    /// `(α_i, β_i)` with `A_i ≈ α_i A_{basis[0]} + β_i A_{basis[1]}`.
    pub coefficients: Vec<(f64, f64)>,
    /// Largest `‖A_i − α_i B1 − β_i B2‖_max` over the family.
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SetRank {
    pub rank: usize,
    /// Indices of `rank` independent members. For rank two this is the first
    /// independent pair in index order.
    pub basis: Vec<usize>,
    pub dependence: Option<Dependence>,
}

struct Pivoted {
    rank: usize,
    pivots: Vec<usize>,
}

/// Column-pivoted Gram-Schmidt. A candidate is accepted while its residual
/// norm exceeds `tol · (largest input norm)`.
fn pivoted_gram_schmidt(vectors: &[Vec<f64>], tol: f64) -> Pivoted {
    let largest = vectors.iter().map(|v| norm(v)).fold(0.0, f64::max);
    if largest == 0.0 {
        return Pivoted { rank: 0, pivots: vec![] };
    }
    let threshold = tol * largest;
    let mut residual: Vec<Vec<f64>> = vectors.to_vec();
    let mut chosen = vec![false; vectors.len()];
    let mut pivots = Vec::new();
    loop {
        let best = (0..residual.len())
            .filter(|&k| !chosen[k])
            .map(|k| (k, norm(&residual[k])))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let Some((k, nk)) = best else { break };
        if nk <= threshold {
            break;
        }
        chosen[k] = true;
        pivots.push(k);
        let q: Vec<f64> = residual[k].iter().map(|v| v / nk).collect();
        for (j, r) in residual.iter_mut().enumerate() {
            if chosen[j] {
                continue;
            }
            // two passes keep the residuals orthogonal to working precision
            for _ in 0..2 {
                let c = dot(&q, r);
                axpy(-c, &q, r);
            }
        }
    }
    Pivoted { rank: pivots.len(), pivots }
}

/// Numerical rank of a list of vectors (see [`matrix_set_rank`] for the
/// threshold rule).
pub fn numerical_rank(vectors: &[Vec<f64>], tol: f64) -> usize {
    pivoted_gram_schmidt(vectors, tol).rank
}

/// Orthonormal basis of the span of `vectors`, processed in order; a vector
/// is kept when its residual exceeds `tol · max(1, largest norm)`.
pub fn orthonormalize(vectors: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let largest = vectors.iter().map(|v| norm(v)).fold(1.0, f64::max);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &r);
                axpy(-c, q, &mut r);
            }
        }
        let nr = norm(&r);
        if nr > tol * largest {
            basis.push(r.into_iter().map(|x| x / nr).collect());
        }
    }
    basis
}

/// Orthonormal basis of `{x ∈ ℝⁿ : row · x = 0 for every row}`.
pub fn null_space(rows: &[Vec<f64>], n: usize, tol: f64) -> Vec<Vec<f64>> {
    let row_space = orthonormalize(rows, tol);
    let mut basis = row_space.clone();
    let mut out = Vec::new();
    // complete with unit vectors, keeping those with a solid residual
    for i in 0..n {
        if basis.len() == n {
            break;
        }
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &e);
                axpy(-c, q, &mut e);
            }
        }
        let ne = norm(&e);
        if ne > 1e-6 {
            let q: Vec<f64> = e.into_iter().map(|x| x / ne).collect();
            basis.push(q.clone());
            out.push(q);
        }
    }
    out
}

/// Least-squares coordinates of `a` in the pair `(b1, b2)`.
/// Returns `(α, β)` or `DegenerateBasis`.
fn coordinates(a: &[f64], b1: &[f64], b2: &[f64], tol: f64) -> Result<(f64, f64)> {
    let n1 = norm(b1);
    let n2 = norm(b2);
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::DegenerateBasis);
    }
    let q1: Vec<f64> = b1.iter().map(|v| v / n1).collect();
    let p = dot(&q1, b2);
    let mut u = b2.to_vec();
    axpy(-p, &q1, &mut u);
    let nu = norm(&u);
    if nu <= tol * n1.max(n2) {
        return Err(Error::DegenerateBasis);
    }
    let q2: Vec<f64> = u.iter().map(|v| v / nu).collect();
    let c1 = dot(&q1, a);
    let c2 = dot(&q2, a);
    let beta = c2 / nu;
    let alpha = (c1 - beta * p) / n1;
    Ok((alpha, beta))
}

fn residual_max(a: &SymMatrix, b1: &SymMatrix, b2: &SymMatrix, alpha: f64, beta: f64) -> f64 {
    let mut r = a.clone();
    r.add_scaled(-alpha, b1);
    r.add_scaled(-beta, b2);
    r.max_abs()
}

/// Coefficients `(α, β)` with `A ≈ α B1 + β B2`, accepted when
/// `‖A − αB1 − βB2‖_max ≤ tol · (1 + ‖A‖_max)`.
pub fn express_in_basis(a: &SymMatrix, b1: &SymMatrix, b2: &SymMatrix, tol: f64) -> Result<(f64, f64)> {
    if a.order() != b1.order() || a.order() != b2.order() {
        return Err(input("matrices have different orders"));
    }
    let (alpha, beta) = coordinates(&a.flatten(), &b1.flatten(), &b2.flatten(), tol)?;
    let residual = residual_max(a, b1, b2, alpha, beta);
    if residual > tol * (1.0 + a.max_abs()) {
        return Err(Error::NotInSpan { residual });
    }
    Ok((alpha, beta))
}

/// Rank of a set of square matrices viewed as vectors.
///
/// Symmetric members flatten to their scaled upper triangle, general square
/// members to all `n²` entries. The rank is computed by column-pivoted
/// elimination with the relative threshold `tol · (largest pivot)`.
pub fn matrix_set_rank<M: SquareOperator>(members: &[M], tol: f64) -> Result<SetRank> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(input("tolerance must be finite and non-negative"));
    }
    let Some(first) = members.first() else {
        return Err(input("matrix family is empty"));
    };
    let n = first.order();
    if members.iter().any(|m| m.order() != n) {
        return Err(input("matrices have different orders"));
    }
    let flat: Vec<Vec<f64>> = members.iter().map(|m| m.flatten()).collect();
    if flat.iter().flatten().any(|v| !v.is_finite()) {
        return Err(input("matrix family has non-finite entries"));
    }
    let pivoted = pivoted_gram_schmidt(&flat, tol);
    let rank = pivoted.rank;
    if rank != 2 {
        let mut basis = pivoted.pivots;
        basis.sort_unstable();
        return Ok(SetRank { rank, basis, dependence: None });
    }

    // first independent pair in index order
    let largest = flat.iter().map(|v| norm(v)).fold(0.0, f64::max);
    let threshold = tol * largest;
    let pair = (0..flat.len()).find(|&i| norm(&flat[i]) > threshold).and_then(|i| {
        let q: Vec<f64> = flat[i].iter().map(|v| v / norm(&flat[i])).collect();
        (i + 1..flat.len())
            .find(|&j| {
                let mut r = flat[j].clone();
                axpy(-dot(&q, &r), &q, &mut r);
                norm(&r) > threshold
            })
            .map(|j| [i, j])
    });
    let basis = pair.unwrap_or([pivoted.pivots[0], pivoted.pivots[1]]);
    let (b1, b2) = (&flat[basis[0]], &flat[basis[1]]);
    let mut coefficients = Vec::with_capacity(flat.len());
    let mut max_residual = 0.0_f64;
    for f in &flat {
        let (alpha, beta) = coordinates(f, b1, b2, tol)?;
        let mut r = f.clone();
        axpy(-alpha, b1, &mut r);
        axpy(-beta, b2, &mut r);
        max_residual = max_residual.max(super::max_abs(&r));
        coefficients.push((alpha, beta));
    }
    Ok(SetRank { rank, basis: basis.to_vec(), dependence: Some(Dependence { basis, coefficients, max_residual }) })
}

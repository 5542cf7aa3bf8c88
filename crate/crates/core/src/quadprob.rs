//! The quadratically constrained problem
//!
//! ```text
//!     minimize    z
//!     subject to  ½ xᵀAᵢx − z ≤ 0,   i = 1..m
//! ```
//!
//! at `(x, z) = (0, 0)`, and the Jacobian columns `vᵢ(x) = (Aᵢx; a)`.
//!
//! For symmetric `Aᵢ` and `a ≠ 0`, `J(x) = [v₁(x) ⋯ v_m(x)]` has rank at most
//! two for every `x` exactly when the `Aᵢ` lie on one affine line, and then
//! the set rank of `{Aᵢ}` is at most two. A linear dependence is not enough:
//! `A₁ + A₂ + A₃ = 0` with independent `A₁, A₂` gives rank-3 Jacobians, because
//! the last row of `J` only cancels under coefficients summing to zero.
//! [`extract_dependence`] recovers the affine relation on one triple.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cone::FirstOrderCone;
use crate::error::{input, Error, Result};
use crate::linalg::{
    matrix_set_rank, numerical_rank, sym_eigen, Matrix, MatrixFamily, SetRank, SquareOperator, SymMatrix, DEFAULT_TOL,
};
use crate::nlp::{KktData, KktSpec};
use crate::sample::ball;
use crate::yuan::{certify_rank2_with_tol, CertificateReport, Outcome};

pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_RADIUS: f64 = 1.0;
pub const DEFAULT_SEED: u64 = 42;

/// `|1 + δ|` below this makes `(A + δB)/(1 + δ)` meaningless.
pub const DELTA_DEGENERACY_TOL: f64 = 1e-6;

/// Sample budget when searching for a rank-3 Jacobian after a failed triple.
const VIOLATION_SAMPLES: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadProblem {
    matrices: MatrixFamily,
    ray_constant: f64,
}

impl QuadProblem {
    pub fn new(matrices: MatrixFamily, ray_constant: f64) -> Result<Self> {
        if ray_constant == 0.0 || !ray_constant.is_finite() {
            return Err(input(format!("ray constant must be finite and nonzero, got {ray_constant}")));
        }
        Ok(QuadProblem { matrices, ray_constant })
    }

    /// The optimization form, `a = −1`.
    pub fn minimization(matrices: MatrixFamily) -> Self {
        QuadProblem { matrices, ray_constant: -1.0 }
    }

    pub fn matrices(&self) -> &MatrixFamily {
        &self.matrices
    }

    pub fn ray_constant(&self) -> f64 {
        self.ray_constant
    }

    pub fn n(&self) -> usize {
        self.matrices.order()
    }

    pub fn jacobian_at(&self, x: &[f64]) -> Result<Matrix> {
        jacobian(self.matrices.members(), self.ray_constant, x)
    }

    pub fn rank_increase_check(&self, samples: usize, radius: f64, seed: u64) -> Result<RankProfile> {
        jacobian_rank_profile(self.matrices.members(), self.ray_constant, samples, radius, seed)
    }

    fn require_minimization(&self) -> Result<()> {
        if self.ray_constant != -1.0 {
            return Err(input(format!("optimization form needs ray constant -1, got {}", self.ray_constant)));
        }
        Ok(())
    }
}

/// `(n+1) × m` matrix with column `i` equal to `(Aᵢx; a)`. Works for
/// non-symmetric matrices too.
pub fn jacobian<M: SquareOperator>(mats: &[M], a: f64, x: &[f64]) -> Result<Matrix> {
    let Some(first) = mats.first() else {
        return Err(input("jacobian needs at least one matrix"));
    };
    let n = first.order();
    if x.len() != n {
        return Err(input(format!("point has length {} (expected {n})", x.len())));
    }
    let cols: Vec<Vec<f64>> = mats
        .iter()
        .map(|m| {
            let mut c = m.apply(x);
            c.push(a);
            c
        })
        .collect();
    Matrix::from_columns(n + 1, &cols)
}

fn jacobian_rank<M: SquareOperator>(mats: &[M], a: f64, x: &[f64]) -> Result<usize> {
    Ok(numerical_rank(&jacobian(mats, a, x)?.columns(), DEFAULT_TOL))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankProfile {
    pub rank_at_zero: usize,
    pub max_rank_observed: usize,
    /// First sampled point attaining `max_rank_observed`.
    pub argmax: Vec<f64>,
    pub satisfied: bool,
}

/// Samples `J(x)` uniformly in the ball of radius `radius` and compares the
/// largest rank seen against the rank at the origin.
pub fn jacobian_rank_profile<M: SquareOperator>(
    mats: &[M],
    a: f64,
    samples: usize,
    radius: f64,
    seed: u64,
) -> Result<RankProfile> {
    if samples == 0 || !(radius > 0.0) {
        return Err(input("need at least one sample and a positive radius"));
    }
    let Some(first) = mats.first() else {
        return Err(input("jacobian needs at least one matrix"));
    };
    let n = first.order();
    let zero = vec![0.0; n];
    let rank_at_zero = jacobian_rank(mats, a, &zero)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (0, zero);
    for _ in 0..samples {
        let x = ball(&mut rng, n, radius);
        let r = jacobian_rank(mats, a, &x)?;
        if r > best.0 {
            best = (r, x);
        }
    }
    Ok(RankProfile { rank_at_zero, max_rank_observed: best.0, argmax: best.1, satisfied: best.0 <= rank_at_zero + 1 })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TripleDependence {
    /// `B = C`.
    Equal,
    /// `(A − C) + δ(B − C) = 0`.
    Delta(f64),
    NotDependent {
        residual: f64,
    },
}

/// Recovers `δ` with `(A − C) + δ(B − C) = 0` from one eigenvector of `B − C`.
///
/// With `(B − C)v = λv`, `λ ≠ 0`, pointwise dependence at `x = v` forces
/// `vᵀ(A − C)v = −δλ`. The identity is then checked on the whole matrix.
pub fn extract_dependence(a: &SymMatrix, b: &SymMatrix, c: &SymMatrix, tol: f64) -> Result<TripleDependence> {
    let n = a.order();
    if b.order() != n || c.order() != n {
        return Err(input("matrices differ in order"));
    }
    let scale = a.max_abs().max(b.max_abs()).max(c.max_abs());
    let amc = a.sub(c);
    let bmc = b.sub(c);
    let spec = sym_eigen(&bmc)?;
    let (k, lambda) = spec
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
        .expect("order is positive");
    if lambda.abs() <= tol * (1.0 + scale) || lambda.abs() <= 1e-8 * bmc.max_abs() {
        return Ok(TripleDependence::Equal);
    }
    let v = spec.eigenvector(k);
    let delta = -crate::linalg::dot(&v, &amc.mul_vec(&v)) / lambda;
    let mut r = amc;
    r.add_scaled(delta, &bmc);
    let residual = r.max_abs();
    if residual > tol * (1.0 + scale) {
        return Ok(TripleDependence::NotDependent { residual });
    }
    Ok(TripleDependence::Delta(delta))
}

/// `C = (A + δB)/(1 + δ)`, the third member of a triple with known `δ`.
pub fn dependent_third(a: &SymMatrix, b: &SymMatrix, delta: f64) -> Result<SymMatrix> {
    if a.order() != b.order() {
        return Err(input("matrices differ in order"));
    }
    if !delta.is_finite() || (1.0 + delta).abs() < DELTA_DEGENERACY_TOL {
        return Err(Error::DegenerateDelta(delta));
    }
    let mut c = a.clone();
    c.add_scaled(delta, b);
    Ok(c.scaled(1.0 / (1.0 + delta)))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Lemma3Outcome {
    Reduced(SetRank),
    /// Triple `(i, j, k)` is independent and `J(x)` has rank 3 at `x`.
    Violated {
        triple: [usize; 3],
        residual: f64,
        x: Vec<f64>,
    },
}

/// Checks every index triple for pointwise dependence and, when all pass,
/// returns the set rank with its basis and coefficients.
pub fn lemma3_reduce(prob: &QuadProblem, tol: f64) -> Result<Lemma3Outcome> {
    let mats = prob.matrices.members();
    let m = mats.len();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                if let TripleDependence::NotDependent { residual } =
                    extract_dependence(&mats[i], &mats[j], &mats[k], tol)?
                {
                    let triple = [i, j, k];
                    let x = rank3_point(prob, triple)?;
                    return Ok(Lemma3Outcome::Violated { triple, residual, x });
                }
            }
        }
    }
    let set_rank = matrix_set_rank(mats, tol)?;
    if set_rank.rank > 2 {
        return Err(Error::NumericalFailure(format!("all triples dependent but set rank is {}", set_rank.rank)));
    }
    Ok(Lemma3Outcome::Reduced(set_rank))
}

fn rank3_point(prob: &QuadProblem, triple: [usize; 3]) -> Result<Vec<f64>> {
    let sub: Vec<SymMatrix> = triple.iter().map(|&i| prob.matrices.members()[i].clone()).collect();
    let n = prob.n();
    let ones = vec![1.0; n];
    if jacobian_rank(&sub, prob.ray_constant, &ones)? >= 3 {
        return Ok(ones);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    for _ in 0..VIOLATION_SAMPLES {
        let x = ball(&mut rng, n, DEFAULT_RADIUS);
        if jacobian_rank(&sub, prob.ray_constant, &x)? >= 3 {
            return Ok(x);
        }
    }
    Err(Error::NumericalFailure(format!(
        "triple {triple:?} is independent but no rank-3 Jacobian found in {VIOLATION_SAMPLES} samples"
    )))
}

/// Weights `t` on the simplex with `Σ tᵢAᵢ` PSD on all of `ℝⁿ`, under the
/// rank-increase hypothesis on the Jacobian.
pub fn theorem4_certificate(prob: &QuadProblem) -> Result<CertificateReport> {
    theorem4_certificate_with(prob, DEFAULT_SAMPLES, DEFAULT_RADIUS, DEFAULT_SEED, DEFAULT_TOL)
}

pub fn theorem4_certificate_with(
    prob: &QuadProblem,
    samples: usize,
    radius: f64,
    seed: u64,
    tol: f64,
) -> Result<CertificateReport> {
    prob.require_minimization()?;
    let profile = prob.rank_increase_check(samples, radius, seed)?;
    let violated = |reason: String| {
        let mut report =
            CertificateReport { outcome: Outcome::HypothesisViolated { reason }, residuals: Default::default() };
        report.residuals.insert("jacobian_rank_at_zero".into(), profile.rank_at_zero as f64);
        report.residuals.insert("jacobian_max_rank".into(), profile.max_rank_observed as f64);
        report
    };
    if !profile.satisfied {
        return Ok(violated(format!(
            "jacobian rank rises from {} to {} at x = {:?}",
            profile.rank_at_zero, profile.max_rank_observed, profile.argmax
        )));
    }
    match lemma3_reduce(prob, tol)? {
        Lemma3Outcome::Violated { triple, x, .. } => {
            Ok(violated(format!("members {triple:?} are independent; jacobian has rank 3 at x = {x:?}")))
        }
        Lemma3Outcome::Reduced(_) => {
            let mut report = certify_rank2_with_tol(&prob.matrices, &FirstOrderCone::full(prob.n()), tol)?;
            report.residuals.insert("jacobian_rank_at_zero".into(), profile.rank_at_zero as f64);
            report.residuals.insert("jacobian_max_rank".into(), profile.max_rank_observed as f64);
            Ok(report)
        }
    }
}

/// KKT data at `(x*, z*) = (0, 0)` in the `n + 1` variables `(x, z)`.
pub fn to_kkt(prob: &QuadProblem) -> Result<KktData> {
    prob.require_minimization()?;
    let n = prob.n();
    let m = prob.matrices.len();
    let mut grad_f = vec![0.0; n + 1];
    grad_f[n] = 1.0;
    let mut grad_g = vec![0.0; n + 1];
    grad_g[n] = -1.0;
    KktData::new(KktSpec {
        grad_f,
        grad_g: vec![grad_g; m],
        hess_g: prob.matrices.members().iter().map(|a| a.embed(n + 1)).collect(),
        active: Some((0..m).collect()),
        ..Default::default()
    })
}

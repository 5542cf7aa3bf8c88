//! Convex combinations of quadratic forms that are positive semidefinite on a
//! first-order cone.
//!
//! [`yuan_two`] decides the two-matrix case: either some `tA + (1-t)B` is PSD
//! on `K`, or there is a direction in `K` on which both forms are negative.
//! [`certify_rank2`] extends this to any number of matrices spanning a space
//! of dimension at most two, by repeatedly discarding one member according to
//! the signs of its coordinates in a two-member basis until two remain.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::cone::{cone_contains, restrict_to_cone, FirstOrderCone};
use crate::error::{input, Error, Result};
use crate::linalg::{
    dot, express_in_basis, matrix_set_rank, norm, quad_form_unchecked, sym_eigen, MatrixFamily, SymMatrix, DEFAULT_TOL,
};

/// Relative threshold below which a smallest eigenvalue counts as negative.
pub const CERTIFICATE_TOL: f64 = 1e-9;

const GOLDEN_TOL: f64 = 1e-12;
const GOLDEN_MAX_ITER: usize = 200;
const WITNESS_SEED: u64 = 0x5eed_9a11;
const WITNESS_SAMPLES: usize = 20_000;

/// A point of the simplex `{t ≥ 0, Σ t = 1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexWeights(Vec<f64>);

impl SimplexWeights {
    /// Validates `t ≥ 0` and `|Σt − 1| ≤ 1e-12`.
    pub fn new(t: Vec<f64>) -> Result<Self> {
        if t.is_empty() {
            return Err(input("weights must be non-empty"));
        }
        if t.iter().any(|v| !(*v >= 0.0)) {
            return Err(input("weights must be non-negative"));
        }
        let sum: f64 = t.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(input(format!("weights sum to {sum}, not 1")));
        }
        Ok(SimplexWeights(t))
    }

    /// Clamps round-off negatives (≥ -1e-12 relative) and rescales to sum 1.
    pub fn normalized(mut t: Vec<f64>) -> Result<Self> {
        let sum: f64 = t.iter().map(|v| v.max(0.0)).sum();
        if t.is_empty() || !(sum > 0.0) {
            return Err(input("weights must have positive sum"));
        }
        if t.iter().any(|v| *v < -1e-12 * sum) {
            return Err(input("weights must be non-negative"));
        }
        for v in &mut t {
            *v = v.max(0.0) / sum;
        }
        Ok(SimplexWeights(t))
    }

    pub fn uniform(m: usize) -> Self {
        SimplexWeights(vec![1.0 / m as f64; m])
    }

    pub fn unit(m: usize, i: usize) -> Self {
        let mut t = vec![0.0; m];
        t[i] = 1.0;
        SimplexWeights(t)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    /// `Σ tᵢAᵢ` restricted to the cone span has smallest eigenvalue `lambda_min`.
    Certified {
        weights: SimplexWeights,
        lambda_min: f64,
    },
    /// `witness ∈ K` with every form value strictly negative.
    Refuted {
        witness: Vec<f64>,
        form_values: Vec<f64>,
    },
    HypothesisViolated {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateReport {
    pub outcome: Outcome,
    /// Named diagnostics (basis residuals, search interval widths, ranks).
    pub residuals: BTreeMap<String, f64>,
}

impl CertificateReport {
    fn new(outcome: Outcome) -> Self {
        CertificateReport { outcome, residuals: BTreeMap::new() }
    }

    fn with(mut self, key: &str, value: f64) -> Self {
        self.residuals.insert(key.to_string(), value);
        self
    }

    pub fn is_certified(&self) -> bool {
        matches!(self.outcome, Outcome::Certified { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self.outcome, Outcome::Refuted { .. })
    }

    pub fn weights(&self) -> Option<&SimplexWeights> {
        match &self.outcome {
            Outcome::Certified { weights, .. } => Some(weights),
            _ => None,
        }
    }

    pub fn lambda_min(&self) -> Option<f64> {
        match &self.outcome {
            Outcome::Certified { lambda_min, .. } => Some(*lambda_min),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&[f64]> {
        match &self.outcome {
            Outcome::Refuted { witness, .. } => Some(witness),
            _ => None,
        }
    }
}

/// `λ_min(tA + (1 − t)B)`.
pub fn lambda_min_profile(a: &SymMatrix, b: &SymMatrix, t: f64) -> Result<f64> {
    if a.order() != b.order() {
        return Err(input("matrices have different orders"));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(input(format!("pencil parameter {t} outside [0, 1]")));
    }
    let mut c = a.scaled(t);
    c.add_scaled(1.0 - t, b);
    Ok(sym_eigen(&c)?.min())
}

/// Smallest eigenvalue of `Σ tᵢAᵢ` restricted to the span of `cone`.
/// A zero-dimensional cone yields 0.
pub fn combined_lambda_min(family: &MatrixFamily, cone: &FirstOrderCone, weights: &[f64]) -> Result<f64> {
    if weights.len() != family.len() {
        return Err(input(format!("{} weights for a family of {} matrices", weights.len(), family.len())));
    }
    let combined = family.combination(weights)?;
    match restrict_to_cone(&combined, cone)? {
        Some(r) => Ok(sym_eigen(&r)?.min()),
        None => Ok(0.0),
    }
}

/// Maximizes a concave function on `[0, 1]` by golden-section search.
/// Returns `(argmax, max, final bracket width)`.
fn golden_section_max(mut f: impl FnMut(f64) -> Result<f64>) -> Result<(f64, f64, f64)> {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut iter = 0;
    while hi - lo > GOLDEN_TOL && iter < GOLDEN_MAX_ITER {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        }
        iter += 1;
    }
    let mid = 0.5 * (lo + hi);
    let mut best = (mid, f(mid)?);
    for t in [0.0, 1.0] {
        let v = f(t)?;
        if v > best.1 {
            best = (t, v);
        }
    }
    Ok((best.0, best.1, hi - lo))
}

/// `max_i cᵀ Rᵢ c / cᵀc`.
fn max_form(restricted: &[SymMatrix], c: &[f64]) -> f64 {
    let nc = dot(c, c);
    restricted.iter().map(|r| quad_form_unchecked(r, c) / nc).fold(f64::NEG_INFINITY, f64::max)
}

/// Pattern search on the unit sphere decreasing [`max_form`].
fn refine(restricted: &[SymMatrix], start: &[f64]) -> (Vec<f64>, f64) {
    let k = start.len();
    let mut c = start.to_vec();
    let mut best = max_form(restricted, &c);
    let mut step = 0.1;
    let mut evals = 0;
    while step > 1e-9 && evals < 4000 {
        let mut improved = false;
        for j in 0..k {
            for sign in [1.0, -1.0] {
                let mut trial = c.clone();
                trial[j] += sign * step;
                let nt = norm(&trial);
                if nt == 0.0 {
                    continue;
                }
                trial.iter_mut().for_each(|v| *v /= nt);
                let value = max_form(restricted, &trial);
                evals += 1;
                if value < best {
                    best = value;
                    c = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (c, best)
}

/// Searches span coordinates `c` with every `cᵀRᵢc < -threshold`.
///
/// Candidates, in order: bottom eigenvectors of `hint` (the best combination
/// found by the solver), a grid over mixtures of its three lowest
/// eigenvectors, then seeded random directions. The best candidate of each
/// stage is polished by [`refine`].
fn search_common_negative(restricted: &[SymMatrix], hint: &SymMatrix, threshold: f64) -> Result<Option<Vec<f64>>> {
    let k = hint.order();
    let spectrum = sym_eigen(hint)?;
    let accept = |c: &[f64]| max_form(restricted, c) < -threshold;

    let bottom: Vec<Vec<f64>> = (0..k.min(3)).map(|i| spectrum.eigenvector(i)).collect();
    if accept(&bottom[0]) {
        return Ok(Some(bottom[0].clone()));
    }

    // mixtures of the lowest eigenvectors, parametrized on the 2-sphere
    let mut best = (bottom[0].clone(), max_form(restricted, &bottom[0]));
    let (n_theta, n_phi) = match bottom.len() {
        1 => (1, 1),
        2 => (1, 256),
        _ => (64, 128),
    };
    for it in 0..n_theta {
        let theta = if bottom.len() == 3 {
            std::f64::consts::PI * (it as f64 + 0.5) / n_theta as f64
        } else {
            0.5 * std::f64::consts::PI
        };
        for ip in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * ip as f64 / n_phi as f64;
            let weights = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            let mut c = vec![0.0; k];
            for (w, v) in weights.iter().zip(&bottom) {
                crate::linalg::axpy(*w, v, &mut c);
            }
            if norm(&c) < 1e-12 {
                continue;
            }
            let value = max_form(restricted, &c);
            if value < best.1 {
                best = (c, value);
            }
        }
    }
    let (c, value) = refine(restricted, &best.0);
    if value < -threshold {
        return Ok(Some(c));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(WITNESS_SEED);
    let mut best = (c, value);
    for _ in 0..WITNESS_SAMPLES {
        let c: Vec<f64> = (0..k).map(|_| StandardNormal.sample(&mut rng)).collect();
        if norm(&c) == 0.0 {
            continue;
        }
        let value = max_form(restricted, &c);
        if value < best.1 {
            best = (c, value);
        }
    }
    let (c, value) = refine(restricted, &best.0);
    Ok((value < -threshold).then_some(c))
}

/// Maps span coordinates to a unit ambient vector inside `cone` (flipping
/// the sign when the ray coordinate is negative, which leaves every form
/// value unchanged).
fn to_cone_vector(cone: &FirstOrderCone, coords: &[f64]) -> Vec<f64> {
    let nc = norm(coords);
    let mut c: Vec<f64> = coords.iter().map(|v| v / nc).collect();
    if cone.ray().is_some() && c[c.len() - 1] < 0.0 {
        c.iter_mut().for_each(|v| *v = -*v);
    }
    cone.embed(&c)
}

fn check_cone(order: usize, cone: &FirstOrderCone) -> Result<()> {
    if order != cone.ambient_dim() {
        return Err(input(format!("matrix order {order} differs from cone dimension {}", cone.ambient_dim())));
    }
    Ok(())
}

/// Two-matrix solver.
///
/// Maximizes the concave map `t ↦ λ_min(tĀ + (1-t)B̄)` over `[0, 1]`, where
/// `Ā`, `B̄` are the restrictions to the span of `K`. A maximum of at least
/// `-1e-9 · scale` certifies the weights `(t, 1-t)`. Otherwise a direction in
/// `K` making both forms negative must exist; it is searched for and
/// verified, and failing to find it is a [`Error::NumericalFailure`].
pub fn yuan_two(a: &SymMatrix, b: &SymMatrix, cone: &FirstOrderCone) -> Result<CertificateReport> {
    if a.order() != b.order() {
        return Err(input("matrices have different orders"));
    }
    check_cone(a.order(), cone)?;
    if !a.is_finite() || !b.is_finite() {
        return Err(input("matrices have non-finite entries"));
    }
    let scale = 1.0 + a.max_abs().max(b.max_abs());
    let threshold = CERTIFICATE_TOL * scale;
    let (Some(ra), Some(rb)) = (restrict_to_cone(a, cone)?, restrict_to_cone(b, cone)?) else {
        return Ok(CertificateReport::new(Outcome::Certified { weights: SimplexWeights::uniform(2), lambda_min: 0.0 }));
    };

    let (t, best, width) = golden_section_max(|t| lambda_min_profile(&ra, &rb, t))?;
    if best >= -threshold {
        let weights = SimplexWeights::normalized(vec![t, 1.0 - t])?;
        return Ok(
            CertificateReport::new(Outcome::Certified { weights, lambda_min: best }).with("golden_interval", width)
        );
    }

    let mut hint = ra.scaled(t);
    hint.add_scaled(1.0 - t, &rb);
    let restricted = [ra, rb];
    let Some(coords) = search_common_negative(&restricted, &hint, threshold)? else {
        return Err(Error::NumericalFailure(format!(
            "max over the pencil is {best:.3e} < 0 but no common negative direction was found"
        )));
    };
    let witness = to_cone_vector(cone, &coords);
    let form_values = vec![quad_form_unchecked(a, &witness), quad_form_unchecked(b, &witness)];
    if form_values.iter().any(|v| *v >= -threshold) {
        return Err(Error::NumericalFailure("witness failed verification".into()));
    }
    Ok(CertificateReport::new(Outcome::Refuted { witness, form_values })
        .with("pencil_max", best)
        .with("golden_interval", width))
}

/// Intermediate result of the reduction, in global member indices.
enum Partial {
    Weights(Vec<(usize, f64)>),
    Witness(Vec<f64>),
}

struct Reduction<'a> {
    family: &'a MatrixFamily,
    cone: &'a FirstOrderCone,
    rank_tol: f64,
    threshold: f64,
    max_basis_residual: f64,
    depth: usize,
}

impl Reduction<'_> {
    fn member(&self, i: usize) -> &SymMatrix {
        &self.family.members()[i]
    }

    fn single(&self, i: usize) -> Result<Partial> {
        let r = restrict_to_cone(self.member(i), self.cone)?.expect("cone span is non-trivial");
        let spectrum = sym_eigen(&r)?;
        if spectrum.min() >= -self.threshold {
            Ok(Partial::Weights(vec![(i, 1.0)]))
        } else {
            Ok(Partial::Witness(to_cone_vector(self.cone, &spectrum.eigenvector(0))))
        }
    }

    fn pair(&self, i: usize, j: usize) -> Result<Partial> {
        let report = yuan_two(self.member(i), self.member(j), self.cone)?;
        match report.outcome {
            Outcome::Certified { weights, .. } => {
                let w = weights.as_slice();
                Ok(Partial::Weights(vec![(i, w[0]), (j, w[1])]))
            }
            Outcome::Refuted { witness, .. } => Ok(Partial::Witness(witness)),
            Outcome::HypothesisViolated { reason } => Err(Error::NumericalFailure(reason)),
        }
    }

    /// All members are multiples `cᵢ · A_ref` of one matrix.
    fn rank_one(&self, idx: &[usize]) -> Result<Partial> {
        let flats: Vec<Vec<f64>> = idx.iter().map(|&i| self.member(i).flatten()).collect();
        let (r, _) =
            flats.iter().enumerate().map(|(k, f)| (k, norm(f))).max_by(|a, b| a.1.total_cmp(&b.1)).expect("non-empty");
        let reference = self.member(idx[r]);
        let rr = dot(&flats[r], &flats[r]);
        let ref_max = reference.max_abs();
        let coeffs: Vec<f64> = flats.iter().map(|f| dot(f, &flats[r]) / rr).collect();
        let negligible = |c: f64| c.abs() * ref_max <= self.rank_tol * (1.0 + ref_max);

        if let Some(k) = coeffs.iter().position(|c| negligible(*c)) {
            return Ok(Partial::Weights(vec![(idx[k], 1.0)]));
        }
        let pos = coeffs.iter().position(|c| *c > 0.0);
        let neg = coeffs.iter().position(|c| *c < 0.0);
        if let (Some(p), Some(q)) = (pos, neg) {
            // c_p t_p + c_q t_q = 0
            let (cp, cq) = (coeffs[p], coeffs[q]);
            let tp = -cq / (cp - cq);
            return Ok(Partial::Weights(vec![(idx[p], tp), (idx[q], 1.0 - tp)]));
        }
        let sign = coeffs[0].signum();
        let oriented = reference.scaled(sign);
        let restricted = restrict_to_cone(&oriented, self.cone)?.expect("cone span is non-trivial");
        let spectrum = sym_eigen(&restricted)?;
        if spectrum.min() >= -self.threshold {
            let pick = if spectrum.min() >= 0.0 {
                (0..idx.len()).max_by(|&a, &b| coeffs[a].abs().total_cmp(&coeffs[b].abs()))
            } else {
                (0..idx.len()).min_by(|&a, &b| coeffs[a].abs().total_cmp(&coeffs[b].abs()))
            };
            Ok(Partial::Weights(vec![(idx[pick.expect("non-empty")], 1.0)]))
        } else {
            Ok(Partial::Witness(to_cone_vector(self.cone, &spectrum.eigenvector(0))))
        }
    }

    fn solve(&mut self, idx: &[usize]) -> Result<Partial> {
        self.depth += 1;
        match idx.len() {
            1 => return self.single(idx[0]),
            2 => {
                if matrix_set_rank(&[self.member(idx[0]).clone(), self.member(idx[1]).clone()], self.rank_tol)?.rank
                    == 0
                {
                    return Ok(Partial::Weights(vec![(idx[0], 0.5), (idx[1], 0.5)]));
                }
                return self.pair(idx[0], idx[1]);
            }
            _ => {}
        }
        let sub = self.family.subfamily(idx);
        let set_rank = matrix_set_rank(sub.members(), self.rank_tol)?;
        match set_rank.rank {
            0 => return Ok(Partial::Weights(idx.iter().map(|&i| (i, 1.0 / idx.len() as f64)).collect())),
            1 => return self.rank_one(idx),
            2 => {}
            r => {
                return Err(Error::NumericalFailure(format!("reduced family has rank {r}")));
            }
        }
        let dep = set_rank.dependence.expect("rank two carries coordinates");
        let [p, q] = dep.basis;
        let last = (0..idx.len()).rev().find(|k| *k != p && *k != q).expect("at least three members");
        let (b1, b2, am) = (idx[p], idx[q], idx[last]);
        let (alpha, beta) = express_in_basis(self.member(am), self.member(b1), self.member(b2), self.rank_tol)?;
        self.max_basis_residual = self.max_basis_residual.max(dep.max_residual);

        let am_max = self.member(am).max_abs();
        let snap = |c: f64, basis: &SymMatrix| {
            if c.abs() * basis.max_abs() <= self.rank_tol * (1.0 + am_max) {
                0.0
            } else {
                c
            }
        };
        let alpha = snap(alpha, self.member(b1));
        let beta = snap(beta, self.member(b2));

        let without = |drop: usize| -> Vec<usize> { idx.iter().copied().filter(|&i| i != drop).collect() };
        if alpha == 0.0 && beta == 0.0 {
            // A_m vanishes; the zero matrix is PSD
            return Ok(Partial::Weights(vec![(am, 1.0)]));
        }
        if alpha >= 0.0 && beta >= 0.0 {
            return self.solve(&without(am));
        }
        if alpha < 0.0 && beta < 0.0 {
            let denom = 1.0 - alpha - beta;
            return Ok(Partial::Weights(vec![(b1, -alpha / denom), (b2, -beta / denom), (am, 1.0 / denom)]));
        }
        if alpha < 0.0 && beta > 0.0 {
            return self.solve(&without(b2));
        }
        if alpha > 0.0 && beta < 0.0 {
            return self.solve(&without(b1));
        }
        if beta == 0.0 {
            // α < 0: A_m is a negative multiple of B1
            return self.pair(b1, am);
        }
        // α = 0, β < 0
        self.pair(b2, am)
    }
}

/// Certificate for a family of rank at most two.
///
/// Uses [`DEFAULT_TOL`] as the relative rank threshold; see
/// [`certify_rank2_with_tol`].
pub fn certify_rank2(family: &MatrixFamily, cone: &FirstOrderCone) -> Result<CertificateReport> {
    certify_rank2_with_tol(family, cone, DEFAULT_TOL)
}

pub fn certify_rank2_with_tol(
    family: &MatrixFamily,
    cone: &FirstOrderCone,
    rank_tol: f64,
) -> Result<CertificateReport> {
    check_cone(family.order(), cone)?;
    let m = family.len();
    let set_rank = matrix_set_rank(family.members(), rank_tol)?;
    if set_rank.rank > 2 {
        return Ok(CertificateReport::new(Outcome::HypothesisViolated {
            reason: format!("matrix set has rank {} > 2", set_rank.rank),
        })
        .with("rank", set_rank.rank as f64));
    }
    let scale = family.scale();
    let threshold = CERTIFICATE_TOL * scale;
    if cone.span_dim() == 0 || set_rank.rank == 0 {
        let weights = SimplexWeights::uniform(m);
        let lambda_min = combined_lambda_min(family, cone, weights.as_slice())?;
        return Ok(
            CertificateReport::new(Outcome::Certified { weights, lambda_min }).with("rank", set_rank.rank as f64)
        );
    }

    let mut reduction = Reduction { family, cone, rank_tol, threshold, max_basis_residual: 0.0, depth: 0 };
    let all: Vec<usize> = (0..m).collect();
    let partial = reduction.solve(&all)?;
    let report = match partial {
        Partial::Weights(pairs) => {
            let mut t = vec![0.0; m];
            for (i, w) in pairs {
                t[i] += w;
            }
            let weights = SimplexWeights::normalized(t)?;
            let lambda_min = combined_lambda_min(family, cone, weights.as_slice())?;
            if lambda_min < -threshold {
                return Err(Error::NumericalFailure(format!(
                    "certificate failed verification: lambda_min = {lambda_min:.3e}"
                )));
            }
            CertificateReport::new(Outcome::Certified { weights, lambda_min })
        }
        Partial::Witness(witness) => {
            let form_values: Vec<f64> = family.members().iter().map(|a| quad_form_unchecked(a, &witness)).collect();
            if form_values.iter().any(|v| *v >= -threshold) || !cone_contains(cone, &witness, 1e-8) {
                return Err(Error::NumericalFailure("refutation witness does not transfer to the full family".into()));
            }
            CertificateReport::new(Outcome::Refuted { witness, form_values })
        }
    };
    Ok(report
        .with("rank", set_rank.rank as f64)
        .with("basis_residual", reduction.max_basis_residual)
        .with("depth", reduction.depth as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(rows: [[f64; 2]; 2]) -> SymMatrix {
        SymMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn example1() -> MatrixFamily {
        MatrixFamily::new(vec![
            sym([[1.0, -1.0], [-1.0, 1.0]]),
            sym([[-2.0, 1.0], [1.0, 1.0]]),
            sym([[4.0, -3.0], [-3.0, 1.0]]),
        ])
        .unwrap()
    }

    fn example2() -> MatrixFamily {
        MatrixFamily::new(vec![
            sym([[-1.0, 0.0], [0.0, 1.0]]),
            sym([[1.0, 2.0], [2.0, -2.0]]),
            sym([[0.0, -2.0], [-2.0, 1.0]]),
        ])
        .unwrap()
    }

    #[test]
    fn profile_examples() {
        let a = sym([[1.0, 2.0], [2.0, -3.0]]);
        assert!(lambda_min_profile(&a, &a.scaled(-1.0), 0.5).unwrap().abs() < 1e-15);
        let i = SymMatrix::identity(2);
        for t in [0.0, 0.3, 0.9] {
            let v = lambda_min_profile(&i, &i.scaled(-1.0), t).unwrap();
            assert!((v - (2.0 * t - 1.0)).abs() < 1e-15);
        }
        let e1 = example1();
        let v = lambda_min_profile(&e1.members()[1], &e1.members()[2], 0.6).unwrap();
        assert!((v - (1.4 - 1.8_f64.sqrt()) / 2.0).abs() < 1e-9);
        assert!(lambda_min_profile(&a, &a, 1.5).is_err());
    }

    #[test]
    fn yuan_two_opposite_pair() {
        let a = SymMatrix::from_diag(&[1.0, -1.0]);
        let r = yuan_two(&a, &a.scaled(-1.0), &FirstOrderCone::full(2)).unwrap();
        let w = r.weights().unwrap().as_slice();
        assert!((w[0] - 0.5).abs() < 1e-9);
        assert!(r.lambda_min().unwrap().abs() < 1e-9);
    }

    #[test]
    fn yuan_two_identity_certifies() {
        let b = sym([[-5.0, 1.0], [1.0, 2.0]]);
        let k = FirstOrderCone::full(2);
        let r = yuan_two(&SymMatrix::identity(2), &b, &k).unwrap();
        let w = r.weights().unwrap().as_slice();
        let fam = MatrixFamily::new(vec![SymMatrix::identity(2), b]).unwrap();
        assert!(combined_lambda_min(&fam, &k, w).unwrap() >= -1e-9);
    }

    #[test]
    fn yuan_two_refutes_example2_pairs() {
        let e2 = example2();
        let k = FirstOrderCone::full(2);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let r = yuan_two(&e2.members()[i], &e2.members()[j], &k).unwrap();
            let Outcome::Refuted { witness, form_values } = &r.outcome else {
                panic!("pair ({i},{j}) should be refuted, got {:?}", r.outcome);
            };
            assert_eq!(form_values.len(), 2);
            assert!(form_values.iter().all(|v| *v < -1e-6));
            assert!((norm(witness) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn yuan_two_witness_respects_ray() {
        // both forms negative only near ±e1; the cone keeps the +e1 half
        let a = SymMatrix::from_diag(&[-1.0, 1.0]);
        let b = sym([[-1.0, 0.5], [0.5, 0.2]]);
        let k = FirstOrderCone::new(2, &[], Some(&[-1.0, 0.0])).unwrap();
        let r = yuan_two(&a, &b, &k).unwrap();
        let w = r.witness().expect("refuted");
        assert!(cone_contains(&k, w, 1e-12));
    }

    #[test]
    fn certify_example1() {
        let e1 = example1();
        let k = FirstOrderCone::full(2);
        let r = certify_rank2(&e1, &k).unwrap();
        let w = r.weights().expect("certified").as_slice().to_vec();
        assert!(combined_lambda_min(&e1, &k, &w).unwrap() >= -1e-9);
        let reference = combined_lambda_min(&e1, &k, &[0.0, 0.6, 0.4]).unwrap();
        assert!((reference - (1.4 - 1.8_f64.sqrt()) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn certify_example2_uses_zero_combination() {
        let e2 = example2();
        let k = FirstOrderCone::full(2);
        let r = certify_rank2(&e2, &k).unwrap();
        let w = r.weights().expect("certified").as_slice();
        for v in w {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!(r.lambda_min().unwrap().abs() < 1e-12);
    }

    #[test]
    fn certify_rank_one_mixed_signs() {
        let a = SymMatrix::from_diag(&[1.0, -1.0]);
        let fam = MatrixFamily::new(vec![a.clone(), a.scaled(2.0), a.scaled(-1.0)]).unwrap();
        let k = FirstOrderCone::full(2);
        let r = certify_rank2(&fam, &k).unwrap();
        let w = r.weights().unwrap().as_slice();
        assert!(fam.combination(w).unwrap().max_abs() < 1e-12);
        // the hand-derived weights are admissible as well
        assert!(combined_lambda_min(&fam, &k, &[0.5, 0.0, 0.5]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn certify_rank_one_same_sign_refutes() {
        let a = SymMatrix::from_diag(&[1.0, -1.0]);
        let fam = MatrixFamily::new(vec![a.clone(), a.scaled(2.0), a.scaled(3.0)]).unwrap();
        let r = certify_rank2(&fam, &FirstOrderCone::full(2)).unwrap();
        let Outcome::Refuted { form_values, .. } = r.outcome else { panic!("expected refutation") };
        assert!(form_values.iter().all(|v| *v < 0.0));
    }

    #[test]
    fn rank_three_violates_hypothesis() {
        let fam = MatrixFamily::new(vec![
            SymMatrix::from_diag(&[1.0, 0.0]),
            SymMatrix::from_diag(&[0.0, 1.0]),
            sym([[0.0, 1.0], [1.0, 0.0]]),
        ])
        .unwrap();
        let r = certify_rank2(&fam, &FirstOrderCone::full(2)).unwrap();
        assert!(matches!(r.outcome, Outcome::HypothesisViolated { .. }));
    }

    #[test]
    fn zero_family_is_uniform() {
        let fam = MatrixFamily::new(vec![SymMatrix::zeros(3); 4]).unwrap();
        let r = certify_rank2(&fam, &FirstOrderCone::full(3)).unwrap();
        assert_eq!(r.weights().unwrap(), &SimplexWeights::uniform(4));
    }

    #[test]
    fn zero_member_is_selected() {
        // rank-2 family whose last member vanishes: unit weight on it
        let mut members = example1().members().to_vec();
        members.push(SymMatrix::zeros(2));
        let fam = MatrixFamily::new(members).unwrap();
        let r = certify_rank2(&fam, &FirstOrderCone::full(2)).unwrap();
        assert!(r.is_certified());
    }

    #[test]
    fn cone_restriction_changes_verdict() {
        // diag(-1, 1) and diag(-2, 3): negative together along e1 only
        let fam =
            MatrixFamily::new(vec![SymMatrix::from_diag(&[-1.0, 1.0]), SymMatrix::from_diag(&[-2.0, 3.0])]).unwrap();
        assert!(certify_rank2(&fam, &FirstOrderCone::full(2)).unwrap().is_refuted());
        let k = FirstOrderCone::subspace(2, &[vec![0.0, 1.0]]).unwrap();
        assert!(certify_rank2(&fam, &k).unwrap().is_certified());
    }

    #[test]
    fn mismatched_cone_is_input_error() {
        assert!(matches!(certify_rank2(&example1(), &FirstOrderCone::full(3)), Err(Error::Input(_))));
    }

    #[test]
    fn weights_validation() {
        assert!(SimplexWeights::new(vec![0.5, 0.5]).is_ok());
        assert!(SimplexWeights::new(vec![0.5, 0.6]).is_err());
        assert!(SimplexWeights::new(vec![-0.1, 1.1]).is_err());
        assert!(SimplexWeights::normalized(vec![1.0, 1.0, -1e-18]).is_ok());
    }
}

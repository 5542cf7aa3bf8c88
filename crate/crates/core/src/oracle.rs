//! Brute-force cross-checks for the certificate solvers.
//!
//! None of these share code paths with [`crate::yuan`] beyond the eigensolver
//! and the cone restriction: sampling looks for refuting directions directly,
//! the grid search enumerates the simplex, and the hull search maximizes over
//! the planar coefficient polygon instead of running the case recursion.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cone::{restrict_to_cone, FirstOrderCone};
use crate::error::{input, Error, Result};
use crate::linalg::{dot, matrix_set_rank, quad_form, sym_eigen, Matrix, MatrixFamily, SymMatrix, DEFAULT_TOL};
use crate::lp::lp_solve;
use crate::sample::unit_sphere;
use crate::yuan::{combined_lambda_min, CertificateReport, Outcome, SimplexWeights};

pub const DEFAULT_ORACLE_SAMPLES: usize = 10_000;
pub const DEFAULT_RESOLUTION: usize = 50;
/// A refuted family must have no grid or hull point with `λ_min` at or above this.
pub const REFUTED_MARGIN: f64 = 1e-6;
/// Relative slack when comparing `λ_min` values from different searches.
pub const AGREEMENT_TOL: f64 = 1e-8;
const WITNESS_TOL: f64 = 1e-9;
const TERNARY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum SampleVerdict {
    NoWitnessFound,
    Witness { x: Vec<f64>, form_values: Vec<f64> },
}

fn restricted_members(family: &MatrixFamily, cone: &FirstOrderCone) -> Result<Option<Vec<SymMatrix>>> {
    if family.order() != cone.ambient_dim() {
        return Err(input(format!(
            "family order {} differs from cone dimension {}",
            family.order(),
            cone.ambient_dim()
        )));
    }
    if cone.span_dim() == 0 {
        return Ok(None);
    }
    family
        .members()
        .iter()
        .map(|a| restrict_to_cone(a, cone).map(|r| r.expect("span is nonzero")))
        .collect::<Result<_>>()
        .map(Some)
}

/// Samples unit directions in the span of `cone` and returns the first one
/// (oriented into the cone) where every quadratic form is below
/// `−1e-9 · scale`. Since forms are even, `x` and `−x` are one sample.
pub fn sample_max_nonneg(
    family: &MatrixFamily,
    cone: &FirstOrderCone,
    samples: usize,
    seed: u64,
) -> Result<SampleVerdict> {
    if samples == 0 {
        return Err(input("need at least one sample"));
    }
    let Some(restricted) = restricted_members(family, cone)? else {
        return Ok(SampleVerdict::NoWitnessFound);
    };
    let k = cone.span_dim();
    let threshold = -WITNESS_TOL * family.scale();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let mut c = unit_sphere(&mut rng, k);
        let negative = restricted.iter().all(|r| dot(&c, &r.mul_vec(&c)) < threshold);
        if !negative {
            continue;
        }
        if cone.ray().is_some() && c[k - 1] < 0.0 {
            c.iter_mut().for_each(|v| *v = -*v);
        }
        let x = cone.embed(&c);
        let form_values: Vec<f64> = family.members().iter().map(|a| quad_form(a, &x)).collect::<Result<_>>()?;
        if form_values.iter().all(|&v| v < threshold) {
            return Ok(SampleVerdict::Witness { x, form_values });
        }
    }
    Ok(SampleVerdict::NoWitnessFound)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub weights: SimplexWeights,
    pub lambda_min: f64,
}

/// Whether `m − shift·I` is positive definite (Cholesky succeeds).
fn exceeds(m: &SymMatrix, shift: f64) -> bool {
    let n = m.order();
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = m.get(j, j) - shift;
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return false;
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in j + 1..n {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    true
}

/// Exhaustive search over simplex points whose coordinates are multiples of
/// `1/resolution`, maximizing the restricted `λ_min`. Ties keep the first
/// point in lexicographically decreasing order of `t₁, t₂, …`.
pub fn simplex_grid_search(family: &MatrixFamily, cone: &FirstOrderCone, resolution: usize) -> Result<SearchResult> {
    if resolution == 0 {
        return Err(input("resolution must be positive"));
    }
    let m = family.len();
    let Some(restricted) = restricted_members(family, cone)? else {
        return Ok(SearchResult { weights: SimplexWeights::uniform(m), lambda_min: 0.0 });
    };
    let k = restricted[0].order();
    let mut counts = vec![0usize; m];
    counts[0] = resolution;
    let mut best: Option<(Vec<usize>, f64)> = None;
    loop {
        let mut combo = SymMatrix::zeros(k);
        for (c, r) in counts.iter().zip(&restricted) {
            if *c > 0 {
                combo.add_scaled(*c as f64 / resolution as f64, r);
            }
        }
        let improves = match &best {
            None => true,
            Some((_, b)) => exceeds(&combo, *b),
        };
        if improves {
            let lm = sym_eigen(&combo)?.min();
            if best.as_ref().is_none_or(|(_, b)| lm > *b) {
                best = Some((counts.clone(), lm));
            }
        }
        if !next_composition(&mut counts) {
            break;
        }
    }
    let (counts, lambda_min) = best.expect("grid is nonempty");
    let t = counts.iter().map(|&c| c as f64 / resolution as f64).collect();
    Ok(SearchResult { weights: SimplexWeights::normalized(t)?, lambda_min })
}

/// Steps to the next composition of the same total, moving mass rightwards.
fn next_composition(c: &mut [usize]) -> bool {
    let m = c.len();
    if m < 2 {
        return false;
    }
    // rightmost nonzero entry among the first m-1
    let Some(i) = (0..m - 1).rev().find(|&i| c[i] > 0) else {
        return false;
    };
    let tail = c[m - 1];
    c[m - 1] = 0;
    c[i] -= 1;
    c[i + 1] = tail + 1;
    true
}

/// Maximizes a concave function on `[lo, hi]` by ternary search.
fn ternary_max(lo: f64, hi: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > TERNARY_TOL * (1.0 + lo.abs().max(hi.abs())) {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1)? < f(m2)? {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let x = 0.5 * (lo + hi);
    Ok((x, f(x)?))
}

/// Range of `b` over the convex hull of `points` on the vertical line at `a`.
fn hull_slice(points: &[(f64, f64)], a: f64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i..] {
            let (l, r) = if p.0 <= q.0 { (p, q) } else { (q, p) };
            if a < l.0 || a > r.0 {
                continue;
            }
            let (b_lo, b_hi) = if r.0 > l.0 {
                let b = l.1 + (a - l.0) / (r.0 - l.0) * (r.1 - l.1);
                (b, b)
            } else {
                (l.1.min(r.1), l.1.max(r.1))
            };
            lo = lo.min(b_lo);
            hi = hi.max(b_hi);
        }
    }
    (lo, hi)
}

/// Simplex weights whose coefficient point is closest (in ℓ¹) to `target`.
fn recover_weights(points: &[(f64, f64)], target: (f64, f64)) -> Result<SimplexWeights> {
    let m = points.len();
    // variables: t (m), s1+, s1-, s2+, s2-
    let nv = m + 4;
    let mut a = Matrix::zeros(3, nv);
    for (j, p) in points.iter().enumerate() {
        a[(0, j)] = p.0;
        a[(1, j)] = p.1;
        a[(2, j)] = 1.0;
    }
    a[(0, m)] = 1.0;
    a[(0, m + 1)] = -1.0;
    a[(1, m + 2)] = 1.0;
    a[(1, m + 3)] = -1.0;
    let mut c = vec![0.0; nv];
    c[m..].iter_mut().for_each(|v| *v = -1.0);
    let sol = lp_solve(&c, &a, &[target.0, target.1, 1.0], &vec![true; nv])?;
    SimplexWeights::normalized(sol.solution[..m].iter().map(|v| v.max(0.0)).collect())
}

/// Maximizes `λ_min` of the restricted combination over the simplex by
/// working in the plane of basis coordinates: with `Aᵢ = αᵢB₁ + βᵢB₂`, the
/// attainable combinations are `aB₁ + bB₂` for `(a, b)` in the convex hull of
/// the `(αᵢ, βᵢ)`, and `λ_min` is concave there. Nested ternary search finds
/// the maximizer; an LP expresses it as simplex weights, and the reported
/// value is recomputed from those weights.
pub fn hull_psd_search(family: &MatrixFamily, cone: &FirstOrderCone) -> Result<SearchResult> {
    let m = family.len();
    let rank = matrix_set_rank(family.members(), DEFAULT_TOL)?;
    if rank.rank > 2 {
        return Err(Error::HypothesisViolated(format!("set rank is {}", rank.rank)));
    }
    let Some(restricted) = restricted_members(family, cone)? else {
        return Ok(SearchResult { weights: SimplexWeights::uniform(m), lambda_min: 0.0 });
    };
    let weights = match rank.rank {
        0 => SimplexWeights::uniform(m),
        1 => {
            let base = &family.members()[rank.basis[0]];
            let (bf, nb) = (base.flatten(), dot(&base.flatten(), &base.flatten()));
            let coeffs: Vec<f64> = family.members().iter().map(|a| dot(&a.flatten(), &bf) / nb).collect();
            let b0 = &restricted[rank.basis[0]];
            let value = |s: f64| -> Result<f64> { Ok(sym_eigen(&b0.scaled(s))?.min()) };
            let (imin, imax) = argmin_argmax(&coeffs);
            let mut best = (SimplexWeights::unit(m, imin), value(coeffs[imin])?);
            let hi = value(coeffs[imax])?;
            if hi > best.1 {
                best = (SimplexWeights::unit(m, imax), hi);
            }
            if coeffs[imin] < 0.0 && coeffs[imax] > 0.0 && value(0.0)? > best.1 {
                let (p, q) = (coeffs[imax], coeffs[imin]);
                let mut t = vec![0.0; m];
                t[imax] = -q / (p - q);
                t[imin] = p / (p - q);
                best.0 = SimplexWeights::normalized(t)?;
            }
            best.0
        }
        _ => {
            let dep = rank.dependence.as_ref().expect("rank two carries coefficients");
            let points = &dep.coefficients;
            let (b1, b2) = (&restricted[dep.basis[0]], &restricted[dep.basis[1]]);
            let phi = |a: f64, b: f64| -> Result<f64> {
                let mut c = b1.scaled(a);
                c.add_scaled(b, b2);
                Ok(sym_eigen(&c)?.min())
            };
            let amin = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
            let amax = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
            let inner = |a: f64| -> Result<(f64, f64)> {
                let (lo, hi) = hull_slice(points, a);
                ternary_max(lo, hi, |b| phi(a, b))
            };
            let (a_star, _) = ternary_max(amin, amax, |a| inner(a).map(|r| r.1))?;
            let (b_star, _) = inner(a_star)?;
            recover_weights(points, (a_star, b_star))?
        }
    };
    let lambda_min = combined_lambda_min(family, cone, weights.as_slice())?;
    Ok(SearchResult { weights, lambda_min })
}

/// Checks a certificate against the brute-force searches:
///
/// * certified: sampling found no witness, and the hull maximum is at least
///   the certified `λ_min` (it is the exact maximum over the simplex);
/// * refuted: neither the grid nor the hull reaches `λ_min ≥ 1e-6`;
/// * either way the grid maximum does not exceed the hull maximum.
///
/// Returns a description of the first disagreement.
pub fn cross_check(
    family: &MatrixFamily,
    report: &CertificateReport,
    sample: &SampleVerdict,
    grid: &SearchResult,
    hull: Option<&SearchResult>,
) -> std::result::Result<(), String> {
    let slack = AGREEMENT_TOL * family.scale();
    if let Some(h) = hull {
        if grid.lambda_min > h.lambda_min + slack {
            return Err(format!("grid lambda_min {:e} exceeds hull maximum {:e}", grid.lambda_min, h.lambda_min));
        }
    }
    match &report.outcome {
        Outcome::Certified { lambda_min, .. } => {
            if let SampleVerdict::Witness { x, form_values } = sample {
                return Err(format!("certified, but sampling found witness {x:?} with values {form_values:?}"));
            }
            if let Some(h) = hull {
                if h.lambda_min < lambda_min - slack {
                    return Err(format!("certified lambda_min {lambda_min:e}, hull maximum {:e}", h.lambda_min));
                }
            }
            Ok(())
        }
        Outcome::Refuted { .. } => {
            if grid.lambda_min >= REFUTED_MARGIN {
                return Err(format!("refuted, but grid point {:?} has lambda_min {:e}", grid.weights, grid.lambda_min));
            }
            if let Some(h) = hull {
                if h.lambda_min >= REFUTED_MARGIN {
                    return Err(format!("refuted, but hull point {:?} has lambda_min {:e}", h.weights, h.lambda_min));
                }
            }
            Ok(())
        }
        Outcome::HypothesisViolated { .. } => match hull {
            Some(_) => Err("certifier reports set rank above two, hull search accepted the family".into()),
            None => Ok(()),
        },
    }
}

fn argmin_argmax(v: &[f64]) -> (usize, usize) {
    let mut lo = 0;
    let mut hi = 0;
    for (i, x) in v.iter().enumerate() {
        if *x < v[lo] {
            lo = i;
        }
        if *x > v[hi] {
            hi = i;
        }
    }
    (lo, hi)
}

//! Second-order analysis of `min f(x) s.t. h(x) = 0, g(x) ≤ 0` at a fixed
//! candidate point, from frozen first and second derivatives.
//!
//! Index conventions: equality constraints are `0..p1`, inequality
//! constraints `0..p2`; `active` lists inequality indices.

use crate::cone::{restrict_to_cone, FirstOrderCone};
use crate::error::{input, Error, Result};
use crate::linalg::{
    axpy, dot, matrix_set_rank, max_abs, norm, null_space, numerical_rank, sym_eigen, Matrix, MatrixFamily, SymMatrix,
    DEFAULT_TOL,
};
use crate::lp::lp_solve;
use crate::yuan::{certify_rank2_with_tol, CertificateReport, Outcome, CERTIFICATE_TOL};

/// `|g_i| ≤ ACTIVITY_TOL` marks inequality `i` active.
pub const ACTIVITY_TOL: f64 = 1e-8;
/// Max-norm tolerance for identifying two multiplier vertices.
pub const VERTEX_DEDUP_TOL: f64 = 1e-8;
/// Tolerance for checking that a supplied cone lies in the critical cone.
pub const CRITICAL_TOL: f64 = 1e-8;

const MU_FEAS_TOL: f64 = 1e-9;
const GSC_ZERO_TOL: f64 = 1e-9;
const MFCQ_LP_TOL: f64 = 1e-9;

/// Unvalidated derivative data, as read from an instance file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KktSpec {
    pub grad_f: Vec<f64>,
    pub grad_h: Vec<Vec<f64>>,
    pub grad_g: Vec<Vec<f64>>,
    pub hess_f: Option<SymMatrix>,
    pub hess_h: Vec<SymMatrix>,
    pub hess_g: Vec<SymMatrix>,
    pub active: Option<Vec<usize>>,
    pub g_values: Option<Vec<f64>>,
}

/// First- and second-order data of the problem at a candidate point `x*`.
#[derive(Clone, Debug, PartialEq)]
pub struct KktData {
    n: usize,
    grad_f: Vec<f64>,
    grad_h: Vec<Vec<f64>>,
    grad_g: Vec<Vec<f64>>,
    hess_f: SymMatrix,
    hess_h: Vec<SymMatrix>,
    hess_g: Vec<SymMatrix>,
    active: Vec<usize>,
    g_values: Option<Vec<f64>>,
}

fn check_vector(name: &str, v: &[f64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(input(format!("{name} has length {} (expected {n})", v.len())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(input(format!("{name} has non-finite entries")));
    }
    Ok(())
}

fn check_hessian(name: &str, h: &SymMatrix, n: usize) -> Result<()> {
    if h.order() != n {
        return Err(input(format!("{name} has order {} (expected {n})", h.order())));
    }
    if !h.is_finite() {
        return Err(input(format!("{name} has non-finite entries")));
    }
    Ok(())
}

impl KktData {
    /// Validates dimensions. When `active` is omitted it is derived from
    /// `g_values`; when both are present they must agree.
    pub fn new(spec: KktSpec) -> Result<Self> {
        let n = spec.grad_f.len();
        if n == 0 {
            return Err(input("grad_f must be non-empty"));
        }
        check_vector("grad_f", &spec.grad_f, n)?;
        for (i, g) in spec.grad_h.iter().enumerate() {
            check_vector(&format!("grad_h[{i}]"), g, n)?;
        }
        for (i, g) in spec.grad_g.iter().enumerate() {
            check_vector(&format!("grad_g[{i}]"), g, n)?;
        }
        let p1 = spec.grad_h.len();
        let p2 = spec.grad_g.len();
        if spec.hess_h.len() != p1 {
            return Err(input(format!("{} equality Hessians for {p1} equalities", spec.hess_h.len())));
        }
        if spec.hess_g.len() != p2 {
            return Err(input(format!("{} inequality Hessians for {p2} inequalities", spec.hess_g.len())));
        }
        let hess_f = spec.hess_f.unwrap_or_else(|| SymMatrix::zeros(n));
        check_hessian("hess_f", &hess_f, n)?;
        for (i, h) in spec.hess_h.iter().enumerate() {
            check_hessian(&format!("hess_h[{i}]"), h, n)?;
        }
        for (i, h) in spec.hess_g.iter().enumerate() {
            check_hessian(&format!("hess_g[{i}]"), h, n)?;
        }

        let derived = match &spec.g_values {
            Some(g) => {
                check_vector("g_values", g, p2)?;
                Some((0..p2).filter(|&i| g[i].abs() <= ACTIVITY_TOL).collect::<Vec<_>>())
            }
            None => None,
        };
        let active = match (spec.active, derived) {
            (Some(mut a), derived) => {
                a.sort_unstable();
                a.dedup();
                if let Some(bad) = a.iter().find(|&&i| i >= p2) {
                    return Err(input(format!("active index {bad} out of range (p2 = {p2})")));
                }
                if let Some(d) = derived {
                    if d != a {
                        return Err(input(format!("active set {a:?} disagrees with g_values (derived {d:?})")));
                    }
                }
                a
            }
            (None, Some(d)) => d,
            (None, None) => (0..p2).collect(),
        };
        Ok(KktData {
            n,
            grad_f: spec.grad_f,
            grad_h: spec.grad_h,
            grad_g: spec.grad_g,
            hess_f,
            hess_h: spec.hess_h,
            hess_g: spec.hess_g,
            active,
            g_values: spec.g_values,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn p1(&self) -> usize {
        self.grad_h.len()
    }
    pub fn p2(&self) -> usize {
        self.grad_g.len()
    }
    pub fn active(&self) -> &[usize] {
        &self.active
    }
    pub fn grad_f(&self) -> &[f64] {
        &self.grad_f
    }
    pub fn grad_h(&self) -> &[Vec<f64>] {
        &self.grad_h
    }
    pub fn grad_g(&self) -> &[Vec<f64>] {
        &self.grad_g
    }
    pub fn hess_f(&self) -> &SymMatrix {
        &self.hess_f
    }
    pub fn hess_h(&self) -> &[SymMatrix] {
        &self.hess_h
    }
    pub fn hess_g(&self) -> &[SymMatrix] {
        &self.hess_g
    }
    pub fn g_values(&self) -> Option<&[f64]> {
        self.g_values.as_deref()
    }

    /// `1 + ` largest gradient entry.
    fn gradient_scale(&self) -> f64 {
        let rows = self.grad_h.iter().chain(&self.grad_g).chain(std::iter::once(&self.grad_f));
        1.0 + rows.map(|r| max_abs(r)).fold(0.0, f64::max)
    }

    /// Columns `[∇h_1 … ∇h_p1, ∇g_i (i active)]`.
    fn multiplier_columns(&self) -> Vec<Vec<f64>> {
        self.grad_h.iter().cloned().chain(self.active.iter().map(|&i| self.grad_g[i].clone())).collect()
    }
}

/// A Lagrange multiplier `(λ, μ)`; `mu` has one entry per inequality.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierPoint {
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
}

impl MultiplierPoint {
    pub fn zeros(p1: usize, p2: usize) -> Self {
        MultiplierPoint { lambda: vec![0.0; p1], mu: vec![0.0; p2] }
    }

    /// `Σ tᵢ · pointsᵢ`.
    pub fn convex_combination(weights: &[f64], points: &[MultiplierPoint]) -> Result<MultiplierPoint> {
        let Some(first) = points.first() else {
            return Err(input("no multiplier points to combine"));
        };
        if weights.len() != points.len() {
            return Err(input("weights and points differ in count"));
        }
        let mut out = MultiplierPoint::zeros(first.lambda.len(), first.mu.len());
        for (w, p) in weights.iter().zip(points) {
            axpy(*w, &p.lambda, &mut out.lambda);
            axpy(*w, &p.mu, &mut out.mu);
        }
        Ok(out)
    }
}

fn check_point(data: &KktData, pt: &MultiplierPoint) -> Result<()> {
    if pt.lambda.len() != data.p1() || pt.mu.len() != data.p2() {
        return Err(input(format!(
            "multiplier has dimensions ({}, {}), expected ({}, {})",
            pt.lambda.len(),
            pt.mu.len(),
            data.p1(),
            data.p2()
        )));
    }
    Ok(())
}

/// `∇²f + Σ λᵢ ∇²hᵢ + Σ μᵢ ∇²gᵢ`.
pub fn lagrangian_hessian(data: &KktData, pt: &MultiplierPoint) -> Result<SymMatrix> {
    check_point(data, pt)?;
    let mut h = data.hess_f.clone();
    for (l, hh) in pt.lambda.iter().zip(&data.hess_h) {
        h.add_scaled(*l, hh);
    }
    for (m, hg) in pt.mu.iter().zip(&data.hess_g) {
        h.add_scaled(*m, hg);
    }
    Ok(h)
}

/// `∇f + Σ λᵢ ∇hᵢ + Σ μᵢ ∇gᵢ`.
pub fn lagrangian_gradient(data: &KktData, pt: &MultiplierPoint) -> Result<Vec<f64>> {
    check_point(data, pt)?;
    let mut g = data.grad_f.clone();
    for (l, gh) in pt.lambda.iter().zip(&data.grad_h) {
        axpy(*l, gh, &mut g);
    }
    for (m, gg) in pt.mu.iter().zip(&data.grad_g) {
        axpy(*m, gg, &mut g);
    }
    Ok(g)
}

/// Optimum of `max Σβ s.t. Σαᵢ∇hᵢ + Σβᵢ∇gᵢ = 0, β ≥ 0, Σβ ≤ 1`.
fn positive_dependence_lp(data: &KktData) -> Result<f64> {
    let p1 = data.p1();
    let a = data.active.len();
    if a == 0 {
        return Ok(0.0);
    }
    let cols = data.multiplier_columns();
    let nvars = p1 + a + 1;
    let mut aeq = Matrix::zeros(data.n + 1, nvars);
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            aeq[(i, j)] = *v;
        }
    }
    for j in p1..nvars {
        aeq[(data.n, j)] = 1.0;
    }
    let mut b = vec![0.0; data.n + 1];
    b[data.n] = 1.0;
    let mut c = vec![0.0; nvars];
    c[p1..p1 + a].iter_mut().for_each(|v| *v = 1.0);
    let mask: Vec<bool> = (0..nvars).map(|j| j >= p1).collect();
    match lp_solve(&c, &aeq, &b, &mask) {
        Ok(sol) => Ok(sol.optimum),
        Err(Error::Infeasible) | Err(Error::Unbounded) => {
            Err(Error::NumericalFailure("MFCQ linear program has no optimum".into()))
        }
        Err(e) => Err(e),
    }
}

/// Mangasarian-Fromovitz: equality gradients linearly independent and no
/// nonzero nonnegative combination of active inequality gradients lies in
/// their span.
pub fn check_mfcq(data: &KktData) -> Result<bool> {
    if numerical_rank(&data.grad_h, DEFAULT_TOL) < data.p1() {
        return Ok(false);
    }
    Ok(positive_dependence_lp(data)? <= MFCQ_LP_TOL)
}

/// Solves `cols · y ≈ rhs` in the least-squares sense by modified
/// Gram-Schmidt. Returns `None` when the columns are numerically dependent.
fn least_squares(cols: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let k = cols.len();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut r = vec![vec![0.0; k]; k];
    let largest = cols.iter().map(|c| norm(c)).fold(0.0, f64::max);
    for j in 0..k {
        let mut v = cols[j].clone();
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let c = dot(qi, &v);
                r[i][j] += c;
                axpy(-c, qi, &mut v);
            }
        }
        let nv = norm(&v);
        if nv <= DEFAULT_TOL * largest {
            return None;
        }
        r[j][j] = nv;
        q.push(v.into_iter().map(|x| x / nv).collect());
    }
    let qtb: Vec<f64> = q.iter().map(|qi| dot(qi, rhs)).collect();
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|j| r[i][j] * y[j]).sum();
        y[i] = (qtb[i] - s) / r[i][i];
    }
    Some(y)
}

/// All `r`-element subsets of `0..n`, in lexicographic order.
fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(0, n, r, &mut cur, &mut out);
    out
}

/// Vertices of `Λ(x*) = {(λ, μ) : ∇L = 0, μ ≥ 0, μᵢ = 0 off the active set}`.
///
/// Enumerates basic solutions: every choice of `rank − p1` active inequality
/// columns joined with all equality columns, solved exactly, then filtered
/// for `μ ≥ 0` and deduplicated. Output is sorted lexicographically.
pub fn multiplier_vertices(data: &KktData) -> Result<Vec<MultiplierPoint>> {
    let p1 = data.p1();
    let a = data.active.len();
    let cols = data.multiplier_columns();
    let rank = numerical_rank(&cols, DEFAULT_TOL);
    let neg_grad_f: Vec<f64> = data.grad_f.iter().map(|v| -v).collect();
    let scale = data.gradient_scale();

    if numerical_rank(&data.grad_h, DEFAULT_TOL) < p1 {
        // equality multipliers are not unique: the set is empty or contains a line
        return match feasible_point(data)? {
            true => Err(Error::UnboundedDetected),
            false => Err(Error::EmptyMultiplierSet),
        };
    }

    let mut found: Vec<Vec<f64>> = Vec::new();
    for chosen in subsets(a, rank - p1) {
        let basis_cols: Vec<Vec<f64>> =
            (0..p1).map(|i| cols[i].clone()).chain(chosen.iter().map(|&k| cols[p1 + k].clone())).collect();
        let Some(y) = least_squares(&basis_cols, &neg_grad_f) else { continue };
        let mut full = vec![0.0; p1 + a];
        full[..p1].copy_from_slice(&y[..p1]);
        for (slot, &k) in chosen.iter().enumerate() {
            full[p1 + k] = y[p1 + slot];
        }
        if full[p1..].iter().any(|&m| m < -MU_FEAS_TOL) {
            continue;
        }
        full[p1..].iter_mut().for_each(|m| *m = m.max(0.0));
        let mut residual = data.grad_f.clone();
        for (w, c) in full.iter().zip(&cols) {
            axpy(*w, c, &mut residual);
        }
        if max_abs(&residual) > 1e-8 * scale {
            continue;
        }
        found.push(full);
    }
    found.sort_by(|x, y| {
        x.iter().zip(y).map(|(a, b)| a.total_cmp(b)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut unique: Vec<Vec<f64>> = Vec::new();
    for v in found {
        let dup = unique.iter().any(|u| u.iter().zip(&v).all(|(a, b)| (a - b).abs() <= VERTEX_DEDUP_TOL));
        if !dup {
            unique.push(v);
        }
    }
    if unique.is_empty() {
        return Err(Error::EmptyMultiplierSet);
    }
    if positive_dependence_lp(data)? > MFCQ_LP_TOL {
        return Err(Error::UnboundedDetected);
    }
    Ok(unique
        .into_iter()
        .map(|v| {
            let mut mu = vec![0.0; data.p2()];
            for (k, &i) in data.active.iter().enumerate() {
                mu[i] = v[p1 + k];
            }
            MultiplierPoint { lambda: v[..p1].to_vec(), mu }
        })
        .collect())
}

/// Whether `∇L = 0` has any solution with `μ ≥ 0`.
fn feasible_point(data: &KktData) -> Result<bool> {
    let p1 = data.p1();
    let cols = data.multiplier_columns();
    let aeq = Matrix::from_columns(data.n, &cols)?;
    let b: Vec<f64> = data.grad_f.iter().map(|v| -v).collect();
    let mask: Vec<bool> = (0..cols.len()).map(|j| j >= p1).collect();
    match lp_solve(&vec![0.0; cols.len()], &aeq, &b, &mask) {
        Ok(_) => Ok(true),
        Err(Error::Infeasible) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Orthonormal basis of the lineality space of the critical cone: the null
/// space of `∇hᵢ` (all), `∇gᵢ` (active) and `∇f` stacked as rows.
pub fn critical_cone_lineality(data: &KktData) -> Vec<Vec<f64>> {
    let rows: Vec<Vec<f64>> = data
        .grad_h
        .iter()
        .cloned()
        .chain(data.active.iter().map(|&i| data.grad_g[i].clone()))
        .chain(std::iter::once(data.grad_f.clone()))
        .collect();
    null_space(&rows, data.n, DEFAULT_TOL)
}

/// The lineality space as a cone (no ray).
pub fn lineality_cone(data: &KktData) -> Result<FirstOrderCone> {
    FirstOrderCone::subspace(data.n, &critical_cone_lineality(data))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GscReport {
    pub holds: bool,
    /// Active indices whose multiplier vanishes at every vertex.
    pub always_zero: Vec<usize>,
}

/// Generalized strict complementarity: at most one active index has `μᵢ = 0`
/// across the whole multiplier set. Since `μᵢ` is linear, checking the
/// vertices suffices.
pub fn check_gsc(data: &KktData) -> Result<GscReport> {
    let vertices = multiplier_vertices(data)?;
    Ok(gsc_from_vertices(data, &vertices))
}

pub fn gsc_from_vertices(data: &KktData, vertices: &[MultiplierPoint]) -> GscReport {
    let always_zero: Vec<usize> =
        data.active.iter().copied().filter(|&i| vertices.iter().all(|v| v.mu[i] <= GSC_ZERO_TOL)).collect();
    GscReport { holds: always_zero.len() <= 1, always_zero }
}

/// Checks that every direction of `cone` satisfies the linear relations of
/// the critical cone (equalities for subspace directions, the sign
/// condition on active inequalities for the ray).
pub fn check_cone_is_critical(data: &KktData, cone: &FirstOrderCone) -> Result<()> {
    if cone.ambient_dim() != data.n {
        return Err(input(format!("cone dimension {} differs from problem dimension {}", cone.ambient_dim(), data.n)));
    }
    let tol = |row: &[f64]| CRITICAL_TOL * norm(row).max(1.0);
    let equality_rows = data.grad_h.iter().chain(std::iter::once(&data.grad_f));
    let equality_rows: Vec<&Vec<f64>> = equality_rows.collect();
    for (k, d) in cone.subspace_basis().iter().enumerate() {
        for row in equality_rows.iter().copied().chain(data.active.iter().map(|&i| &data.grad_g[i])) {
            let v = dot(row, d);
            if v.abs() > tol(row) {
                return Err(Error::ConeNotCritical(format!("subspace direction {k} has gradient product {v:.3e}")));
            }
        }
    }
    if let Some(d) = cone.ray() {
        for row in &equality_rows {
            let v = dot(row, d);
            if v.abs() > tol(row) {
                return Err(Error::ConeNotCritical(format!("ray has equality product {v:.3e}")));
            }
        }
        for &i in &data.active {
            let v = dot(&data.grad_g[i], d);
            if v > tol(&data.grad_g[i]) {
                return Err(Error::ConeNotCritical(format!("ray increases active inequality {i} ({v:.3e})")));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SecondOrderCertificate {
    pub report: CertificateReport,
    /// `Σ tᵢ · vertexᵢ` when certified.
    pub multiplier: Option<MultiplierPoint>,
    pub vertices: Vec<MultiplierPoint>,
    pub cone: FirstOrderCone,
}

/// Single-multiplier second-order certificate.
///
/// Enumerates the vertices of the multiplier set, forms the Lagrangian
/// Hessian at each, and when those Hessians span a space of dimension at most
/// two, finds weights making their combination PSD on `cone` (default: the
/// critical-cone lineality space). The Hessian is linear in the multiplier, so
/// the same weights applied to the vertices give one multiplier whose Hessian
/// is PSD on the cone; that is re-checked directly.
pub fn second_order_certificate(data: &KktData, cone: Option<&FirstOrderCone>) -> Result<SecondOrderCertificate> {
    if !check_mfcq(data)? {
        return Err(Error::MfcqFailed);
    }
    let cone = match cone {
        Some(k) => {
            check_cone_is_critical(data, k)?;
            k.clone()
        }
        None => lineality_cone(data)?,
    };
    let vertices = multiplier_vertices(data)?;
    let hessians: Vec<SymMatrix> = vertices.iter().map(|v| lagrangian_hessian(data, v)).collect::<Result<_>>()?;
    let family = MatrixFamily::new(hessians)?;
    let set_rank = matrix_set_rank(family.members(), DEFAULT_TOL)?;
    if set_rank.rank > 2 {
        let mut report = certify_rank2_with_tol(&family, &cone, DEFAULT_TOL)?;
        report.residuals.insert("vertices".into(), vertices.len() as f64);
        return Ok(SecondOrderCertificate { report, multiplier: None, vertices, cone });
    }
    let mut report = certify_rank2_with_tol(&family, &cone, DEFAULT_TOL)?;
    report.residuals.insert("vertices".into(), vertices.len() as f64);
    let multiplier = match &report.outcome {
        Outcome::Certified { weights, .. } => {
            let point = MultiplierPoint::convex_combination(weights.as_slice(), &vertices)?;
            let hessian = lagrangian_hessian(data, &point)?;
            let lambda_min = match restrict_to_cone(&hessian, &cone)? {
                Some(r) => sym_eigen(&r)?.min(),
                None => 0.0,
            };
            if lambda_min < -CERTIFICATE_TOL * family.scale() {
                return Err(Error::NumericalFailure(format!(
                    "recombined multiplier fails verification (lambda_min {lambda_min:.3e})"
                )));
            }
            let stationarity = max_abs(&lagrangian_gradient(data, &point)?);
            report.residuals.insert("multiplier_lambda_min".into(), lambda_min);
            report.residuals.insert("stationarity".into(), stationarity);
            Some(point)
        }
        _ => None,
    };
    Ok(SecondOrderCertificate { report, multiplier, vertices, cone })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize) -> KktSpec {
        KktSpec { grad_f: vec![0.0; n], ..Default::default() }
    }

    /// n = 1, two active inequalities with ∇g = -1 and ∇f = 1.
    fn segment() -> KktSpec {
        KktSpec {
            grad_f: vec![1.0],
            grad_g: vec![vec![-1.0], vec![-1.0]],
            hess_g: vec![SymMatrix::zeros(1), SymMatrix::zeros(1)],
            ..Default::default()
        }
    }

    #[test]
    fn hessian_at_zero_multiplier_is_hess_f() {
        let mut s = segment();
        s.hess_f = Some(SymMatrix::from_diag(&[3.0]));
        let d = KktData::new(s).unwrap();
        assert_eq!(lagrangian_hessian(&d, &MultiplierPoint::zeros(0, 2)).unwrap(), SymMatrix::from_diag(&[3.0]));
        assert!(lagrangian_hessian(&d, &MultiplierPoint::zeros(1, 2)).is_err());
    }

    #[test]
    fn mfcq_examples() {
        let d = KktData::new(segment()).unwrap();
        assert!(check_mfcq(&d).unwrap());

        let mut s = spec(2);
        s.grad_h = vec![vec![0.0, 0.0]];
        s.hess_h = vec![SymMatrix::zeros(2)];
        assert!(!check_mfcq(&KktData::new(s).unwrap()).unwrap());

        let mut s = spec(2);
        s.grad_g = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
        s.hess_g = vec![SymMatrix::zeros(2), SymMatrix::zeros(2)];
        assert!(!check_mfcq(&KktData::new(s).unwrap()).unwrap());
    }

    #[test]
    fn segment_vertices() {
        let d = KktData::new(segment()).unwrap();
        let v = multiplier_vertices(&d).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].mu, vec![0.0, 1.0]);
        assert_eq!(v[1].mu, vec![1.0, 0.0]);
    }

    #[test]
    fn equality_only_vertex_is_unique() {
        let s = KktSpec {
            grad_f: vec![2.0, -1.0, 0.0],
            grad_h: vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
            hess_h: vec![SymMatrix::zeros(3), SymMatrix::zeros(3)],
            ..Default::default()
        };
        let v = multiplier_vertices(&KktData::new(s).unwrap()).unwrap();
        assert_eq!(v.len(), 1);
        assert!((v[0].lambda[0] + 2.0).abs() < 1e-12 && (v[0].lambda[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_kkt_point_has_empty_multiplier_set() {
        let mut s = segment();
        s.grad_f = vec![-1.0];
        assert_eq!(multiplier_vertices(&KktData::new(s).unwrap()), Err(Error::EmptyMultiplierSet));
    }

    #[test]
    fn unbounded_multiplier_set_is_detected() {
        let s = KktSpec {
            grad_f: vec![0.0, 0.0],
            grad_g: vec![vec![1.0, 0.0], vec![-1.0, 0.0]],
            hess_g: vec![SymMatrix::zeros(2), SymMatrix::zeros(2)],
            ..Default::default()
        };
        assert_eq!(multiplier_vertices(&KktData::new(s).unwrap()), Err(Error::UnboundedDetected));
    }

    #[test]
    fn lineality_examples() {
        let d = KktData::new(spec(3)).unwrap();
        assert_eq!(critical_cone_lineality(&d).len(), 3);

        let s = KktSpec {
            grad_f: vec![1.0, 0.0],
            grad_g: vec![vec![1.0, 0.0]],
            hess_g: vec![SymMatrix::zeros(2)],
            ..Default::default()
        };
        assert_eq!(critical_cone_lineality(&KktData::new(s).unwrap()), vec![vec![0.0, 1.0]]);
    }

    #[test]
    fn gsc_examples() {
        let single = KktSpec {
            grad_f: vec![1.0],
            grad_g: vec![vec![-1.0]],
            hess_g: vec![SymMatrix::zeros(1)],
            ..Default::default()
        };
        assert!(check_gsc(&KktData::new(single).unwrap()).unwrap().holds);

        // segment in (x1) plus two constraints that only move x2, x3 with
        // no gradient component able to cancel them: their multipliers are 0
        let s = KktSpec {
            grad_f: vec![1.0, 0.0, 0.0],
            grad_g: vec![vec![-1.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
            hess_g: vec![SymMatrix::zeros(3); 4],
            ..Default::default()
        };
        let gsc = check_gsc(&KktData::new(s).unwrap()).unwrap();
        assert!(!gsc.holds);
        assert_eq!(gsc.always_zero, vec![2, 3]);
    }

    #[test]
    fn active_set_from_g_values() {
        let mut s = segment();
        s.g_values = Some(vec![0.0, -0.5]);
        let d = KktData::new(s.clone()).unwrap();
        assert_eq!(d.active(), &[0]);
        s.active = Some(vec![0, 1]);
        assert!(KktData::new(s).is_err());
    }

    #[test]
    fn licq_certificate_uses_unit_weight() {
        // min x1² + x2 s.t. -x2 ≤ 0 at the origin: μ = 1, lineality span(e1)
        let s = KktSpec {
            grad_f: vec![0.0, 1.0],
            hess_f: Some(SymMatrix::from_diag(&[2.0, 0.0])),
            grad_g: vec![vec![0.0, -1.0]],
            hess_g: vec![SymMatrix::zeros(2)],
            ..Default::default()
        };
        let cert = second_order_certificate(&KktData::new(s).unwrap(), None).unwrap();
        assert_eq!(cert.report.weights().unwrap().as_slice(), &[1.0]);
        assert_eq!(cert.multiplier.unwrap().mu, vec![1.0]);
    }

    #[test]
    fn supplied_cone_must_be_critical() {
        let s = KktSpec {
            grad_f: vec![0.0, 1.0],
            grad_g: vec![vec![0.0, -1.0]],
            hess_g: vec![SymMatrix::zeros(2)],
            ..Default::default()
        };
        let d = KktData::new(s).unwrap();
        let bad = FirstOrderCone::full(2);
        assert!(matches!(second_order_certificate(&d, Some(&bad)), Err(Error::ConeNotCritical(_))));
    }

    #[test]
    fn mfcq_failure_is_an_error() {
        let s = KktSpec {
            grad_f: vec![0.0],
            grad_h: vec![vec![0.0]],
            hess_h: vec![SymMatrix::zeros(1)],
            ..Default::default()
        };
        assert_eq!(second_order_certificate(&KktData::new(s).unwrap(), None), Err(Error::MfcqFailed));
    }
}

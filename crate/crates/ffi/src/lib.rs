//! C ABI over `yuancert`.
//!
//! Families and reports are opaque heap handles owned by the caller and
//! released with the matching `*_free`. Every entry point returns a
//! `YcStatus`; on failure a message is kept per thread and can be read with
//! `yc_last_error`. Panics never cross the boundary: they are caught and
//! reported as `YcStatus::Panic`.
//!
//! Matrices are passed as `n × n` row-major `double` arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use yuancert::io::{digest, to_json, ConeSpec, FamilyPayload, InstanceFile, Payload, ReportFile};
use yuancert::linalg::{matrix_set_rank, Matrix};
use yuancert::quadprob::{theorem4_certificate, QuadProblem};
use yuancert::{certify_rank2, yuan_two, CertificateReport, Error, FirstOrderCone, MatrixFamily, Outcome, SymMatrix};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum YcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    HypothesisViolated = 3,
    NumericalFailure = 4,
    /// The requested field is absent for this verdict (e.g. weights of a
    /// refutation).
    NotAvailable = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum YcVerdict {
    Certified = 0,
    Refuted = 1,
    HypothesisViolated = 2,
}

/// A family of symmetric matrices of one order, with an optional cone
/// (default: the whole space).
pub struct YcFamily {
    n: usize,
    members: Vec<SymMatrix>,
    /// `None` is the whole space.
    cone: Option<ConeSpec>,
}

pub struct YcReport {
    command: &'static str,
    report: CertificateReport,
    input_digest: String,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> YcStatus {
    match e {
        Error::Input(_)
        | Error::NotInSpan { .. }
        | Error::DegenerateBasis
        | Error::ConeNotCritical(_)
        | Error::DegenerateDelta(_) => YcStatus::InvalidInput,
        Error::HypothesisViolated(_) | Error::MfcqFailed | Error::EmptyMultiplierSet | Error::UnboundedDetected => {
            YcStatus::HypothesisViolated
        }
        Error::NumericalFailure(_) | Error::Infeasible | Error::Unbounded => YcStatus::NumericalFailure,
    }
}

struct Fail(YcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

type Res<T> = Result<T, Fail>;

fn null(what: &str) -> Fail {
    Fail(YcStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records any failure, and converts panics to `Panic`.
fn guard(f: impl FnOnce() -> Res<()>) -> YcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            YcStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            YcStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Res<&'a [f64]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn rows(flat: &[f64], n: usize) -> Vec<Vec<f64>> {
    flat.chunks(n).map(<[f64]>::to_vec).collect()
}

unsafe fn family_ref<'a>(f: *const YcFamily) -> Res<&'a YcFamily> {
    f.as_ref().ok_or_else(|| null("family"))
}

unsafe fn report_ref<'a>(r: *const YcReport) -> Res<&'a YcReport> {
    r.as_ref().ok_or_else(|| null("report"))
}

impl YcFamily {
    fn family(&self) -> Res<MatrixFamily> {
        Ok(MatrixFamily::new(self.members.clone())?)
    }

    fn cone(&self) -> Res<FirstOrderCone> {
        match &self.cone {
            Some(spec) => Ok(spec.to_cone(self.n)?),
            None => Ok(FirstOrderCone::full(self.n)),
        }
    }

    fn instance(&self) -> InstanceFile {
        let cone = self.cone.clone();
        InstanceFile::new(Payload::Family(FamilyPayload {
            matrices: self.members.iter().map(SymMatrix::to_rows).collect(),
            cone,
            symmetric: true,
        }))
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn yc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message describing the last failure on this thread, or NULL after a
/// success. The pointer stays valid until the next `yc_*` call on the same
/// thread.
#[no_mangle]
pub extern "C" fn yc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates an empty family of order `n` whose cone is the whole space.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn yc_family_new(n: usize, out: *mut *mut YcFamily) -> YcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if n == 0 {
            return Err(Fail(YcStatus::InvalidInput, "order must be positive".into()));
        }
        let fam = YcFamily { n, members: Vec::new(), cone: None };
        *out = Box::into_raw(Box::new(fam));
        Ok(())
    })
}

/// Appends a symmetric member given as `n × n` row-major entries.
///
/// # Safety
/// `family` must come from `yc_family_new`; `entries` must point to `n²`
/// readable doubles.
#[no_mangle]
pub unsafe extern "C" fn yc_family_push(family: *mut YcFamily, entries: *const f64) -> YcStatus {
    guard(|| {
        let fam = family.as_mut().ok_or_else(|| null("family"))?;
        let flat = slice(entries, fam.n * fam.n, "entries")?;
        let m = SymMatrix::from_rows(&rows(flat, fam.n))?;
        fam.members.push(m);
        Ok(())
    })
}

/// Number of members pushed so far (0 for a NULL handle).
///
/// # Safety
/// `family` must be NULL or come from `yc_family_new`.
#[no_mangle]
pub unsafe extern "C" fn yc_family_len(family: *const YcFamily) -> usize {
    family.as_ref().map_or(0, |f| f.members.len())
}

/// Restricts the family to the cone spanned by `k` subspace vectors (`k × n`
/// row-major, may be NULL when `k = 0`) plus the ray `ray` (`n` doubles, or
/// NULL for none).
///
/// # Safety
/// `family` must come from `yc_family_new`; the arrays must be readable
/// for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn yc_family_set_cone(
    family: *mut YcFamily,
    subspace: *const f64,
    k: usize,
    ray: *const f64,
) -> YcStatus {
    guard(|| {
        let fam = family.as_mut().ok_or_else(|| null("family"))?;
        let sub = rows(slice(subspace, k * fam.n, "subspace")?, fam.n);
        let ray = if ray.is_null() { None } else { Some(slice(ray, fam.n, "ray")?.to_vec()) };
        let spec = ConeSpec { subspace: sub, ray, ambient_dim: None };
        spec.to_cone(fam.n)?;
        fam.cone = Some(spec);
        Ok(())
    })
}

/// Canonical JSON instance for the family (free with `yc_string_free`).
/// Reports produced from this family carry the SHA-256 of exactly these
/// bytes, so writing them to a file lets the command-line tool verify the
/// reports.
///
/// # Safety
/// `family` must come from `yc_family_new`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn yc_family_to_json(family: *const YcFamily, out: *mut *mut c_char) -> YcStatus {
    guard(|| {
        let fam = family_ref(family)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = into_c_string(to_json(&fam.instance()));
        Ok(())
    })
}

/// # Safety
/// `family` must be NULL or come from `yc_family_new` and not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn yc_family_free(family: *mut YcFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("JSON has no interior NUL").into_raw()
}

unsafe fn emit(
    family: *const YcFamily,
    out: *mut *mut YcReport,
    command: &'static str,
    run: impl FnOnce(&YcFamily) -> Res<CertificateReport>,
) -> YcStatus {
    guard(|| {
        let fam = family_ref(family)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let report = run(fam)?;
        let input_digest = digest(to_json(&fam.instance()).as_bytes());
        *out = Box::into_raw(Box::new(YcReport { command, report, input_digest }));
        Ok(())
    })
}

/// Certificate or refutation for a family of set rank at most two on its
/// cone. A family of higher rank yields a report with verdict
/// `HypothesisViolated`, not an error.
///
/// # Safety
/// `family` must come from `yc_family_new`; `out` must be writable. The
/// report is released with `yc_report_free`.
#[no_mangle]
pub unsafe extern "C" fn yc_certify(family: *const YcFamily, out: *mut *mut YcReport) -> YcStatus {
    emit(family, out, "certify", |f| Ok(certify_rank2(&f.family()?, &f.cone()?)?))
}

/// Two-member certificate; the family must have exactly two members.
///
/// # Safety
/// As for `yc_certify`.
#[no_mangle]
pub unsafe extern "C" fn yc_yuan_two(family: *const YcFamily, out: *mut *mut YcReport) -> YcStatus {
    emit(family, out, "yuan2", |f| {
        if f.members.len() != 2 {
            return Err(Fail(YcStatus::InvalidInput, format!("expected 2 members, got {}", f.members.len())));
        }
        Ok(yuan_two(&f.members[0], &f.members[1], &f.cone()?)?)
    })
}

/// Certificate for minimizing `z` subject to `½xᵀAᵢx ≤ z` at the origin,
/// using the family's members as `Aᵢ`. The cone is ignored.
///
/// # Safety
/// As for `yc_certify`.
#[no_mangle]
pub unsafe extern "C" fn yc_theorem4_certificate(family: *const YcFamily, out: *mut *mut YcReport) -> YcStatus {
    emit(family, out, "quad", |f| Ok(theorem4_certificate(&QuadProblem::minimization(f.family()?))?))
}

/// Dimension of the span of `count` general (not necessarily symmetric)
/// `n × n` matrices stored back to back in row-major order.
///
/// # Safety
/// `entries` must point to `count · n²` readable doubles and `rank` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn yc_matrix_set_rank(
    entries: *const f64,
    n: usize,
    count: usize,
    tol: f64,
    rank: *mut usize,
) -> YcStatus {
    guard(|| {
        if rank.is_null() {
            return Err(null("rank"));
        }
        if n == 0 || count == 0 {
            return Err(Fail(YcStatus::InvalidInput, "order and count must be positive".into()));
        }
        let flat = slice(entries, count * n * n, "entries")?;
        let mats = flat.chunks(n * n).map(|c| Matrix::from_rows(&rows(c, n))).collect::<Result<Vec<_>, _>>()?;
        *rank = matrix_set_rank(&mats, tol)?.rank;
        Ok(())
    })
}

/// # Safety
/// `report` must come from one of the certificate functions and `verdict`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn yc_report_verdict(report: *const YcReport, verdict: *mut YcVerdict) -> YcStatus {
    guard(|| {
        let r = report_ref(report)?;
        if verdict.is_null() {
            return Err(null("verdict"));
        }
        *verdict = match r.report.outcome {
            Outcome::Certified { .. } => YcVerdict::Certified,
            Outcome::Refuted { .. } => YcVerdict::Refuted,
            Outcome::HypothesisViolated { .. } => YcVerdict::HypothesisViolated,
        };
        Ok(())
    })
}

unsafe fn copy_out(values: Option<&[f64]>, what: &str, buf: *mut f64, cap: usize, len: *mut usize) -> Res<()> {
    let values = values.ok_or_else(|| Fail(YcStatus::NotAvailable, format!("report has no {what}")))?;
    if len.is_null() {
        return Err(null("len"));
    }
    *len = values.len();
    if cap < values.len() {
        return Err(Fail(
            YcStatus::BufferTooSmall,
            format!("{what} needs {} entries, buffer holds {cap}", values.len()),
        ));
    }
    if buf.is_null() {
        return Err(null("buf"));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    Ok(())
}

/// Copies the simplex weights of a certified report into `buf` (capacity
/// `cap`) and stores their count in `len`. With a short buffer, `len` is
/// still set and `BufferTooSmall` is returned.
///
/// # Safety
/// `report` must be a live report; `buf` must be writable for `cap` doubles
/// and `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn yc_report_weights(
    report: *const YcReport,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> YcStatus {
    guard(|| {
        let r = report_ref(report)?;
        copy_out(r.report.weights().map(|w| w.as_slice()), "weights", buf, cap, len)
    })
}

/// Copies the witness direction of a refuted report; see
/// `yc_report_weights` for the buffer protocol.
///
/// # Safety
/// As for `yc_report_weights`.
#[no_mangle]
pub unsafe extern "C" fn yc_report_witness(
    report: *const YcReport,
    buf: *mut f64,
    cap: usize,
    len: *mut usize,
) -> YcStatus {
    guard(|| {
        let r = report_ref(report)?;
        copy_out(r.report.witness(), "witness", buf, cap, len)
    })
}

/// Smallest eigenvalue of the certified combination on the cone.
///
/// # Safety
/// `report` must be a live report and `value` writable.
#[no_mangle]
pub unsafe extern "C" fn yc_report_lambda_min(report: *const YcReport, value: *mut f64) -> YcStatus {
    guard(|| {
        let r = report_ref(report)?;
        if value.is_null() {
            return Err(null("value"));
        }
        *value = r.report.lambda_min().ok_or_else(|| Fail(YcStatus::NotAvailable, "report is not certified".into()))?;
        Ok(())
    })
}

/// The report in the command-line tool's JSON format (free with
/// `yc_string_free`).
///
/// # Safety
/// `report` must be a live report and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn yc_report_to_json(report: *const YcReport, out: *mut *mut c_char) -> YcStatus {
    guard(|| {
        let r = report_ref(report)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = into_c_string(to_json(&ReportFile::from_certificate(r.command, &r.report, &r.input_digest)));
        Ok(())
    })
}

/// # Safety
/// `report` must be NULL or a live report not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn yc_report_free(report: *mut YcReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a string from a `yc_*_to_json` call, freed once.
#[no_mangle]
pub unsafe extern "C" fn yc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

use std::ffi::CStr;
use std::process::Command;
use std::ptr;

use yuancert_ffi::*;

fn family(n: usize, members: &[&[f64]]) -> *mut YcFamily {
    let mut fam = ptr::null_mut();
    unsafe {
        assert_eq!(yc_family_new(n, &mut fam), YcStatus::Ok);
        for m in members {
            assert_eq!(yc_family_push(fam, m.as_ptr()), YcStatus::Ok);
        }
    }
    fam
}

fn last_error() -> String {
    let p = yc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { yc_string_free(p) };
    s
}

const EX1: [&[f64]; 3] = [&[1.0, -1.0, -1.0, 1.0], &[-2.0, 1.0, 1.0, 1.0], &[4.0, -3.0, -3.0, 1.0]];
const EX2: [&[f64]; 3] = [&[-1.0, 0.0, 0.0, 1.0], &[1.0, 2.0, 2.0, -2.0], &[0.0, -2.0, -2.0, 1.0]];

#[test]
fn certify_example1() {
    let fam = family(2, &EX1);
    unsafe {
        let mut rep = ptr::null_mut();
        assert_eq!(yc_certify(fam, &mut rep), YcStatus::Ok);
        let mut v = YcVerdict::Refuted;
        assert_eq!(yc_report_verdict(rep, &mut v), YcStatus::Ok);
        assert_eq!(v, YcVerdict::Certified);

        let mut w = [0.0; 3];
        let mut len = 0;
        assert_eq!(yc_report_weights(rep, ptr::null_mut(), 0, &mut len), YcStatus::BufferTooSmall);
        assert_eq!(len, 3);
        assert_eq!(yc_report_weights(rep, w.as_mut_ptr(), 3, &mut len), YcStatus::Ok);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);

        let mut lm = f64::NAN;
        assert_eq!(yc_report_lambda_min(rep, &mut lm), YcStatus::Ok);
        assert!(lm > 0.0);
        assert_eq!(yc_report_witness(rep, w.as_mut_ptr(), 3, &mut len), YcStatus::NotAvailable);
        assert!(last_error().contains("witness"));
        yc_report_free(rep);
        yc_family_free(fam);
    }
}

#[test]
fn yuan_two_refutes_example2_pair() {
    let fam = family(2, &EX2[..2]);
    unsafe {
        let mut rep = ptr::null_mut();
        assert_eq!(yc_yuan_two(fam, &mut rep), YcStatus::Ok);
        let mut v = YcVerdict::Certified;
        yc_report_verdict(rep, &mut v);
        assert_eq!(v, YcVerdict::Refuted);
        let mut x = [0.0; 2];
        let mut len = 0;
        assert_eq!(yc_report_witness(rep, x.as_mut_ptr(), 2, &mut len), YcStatus::Ok);
        for m in &EX2[..2] {
            let q = m[0] * x[0] * x[0] + 2.0 * m[1] * x[0] * x[1] + m[3] * x[1] * x[1];
            assert!(q < 0.0);
        }
        let mut lm = 0.0;
        assert_eq!(yc_report_lambda_min(rep, &mut lm), YcStatus::NotAvailable);
        yc_report_free(rep);

        let three = family(2, &EX2);
        assert_eq!(yc_yuan_two(three, &mut rep), YcStatus::InvalidInput);
        yc_family_free(three);
        yc_family_free(fam);
    }
}

#[test]
fn cone_restriction_changes_verdict() {
    // Both forms are negative along e₁, positive along e₂.
    let fam = family(2, &[&[-1.0, 0.0, 0.0, 1.0], &[-2.0, 0.0, 0.0, 3.0]]);
    unsafe {
        let mut rep = ptr::null_mut();
        let mut v = YcVerdict::Certified;
        assert_eq!(yc_certify(fam, &mut rep), YcStatus::Ok);
        yc_report_verdict(rep, &mut v);
        assert_eq!(v, YcVerdict::Refuted);
        yc_report_free(rep);

        let ray = [0.0, 1.0];
        assert_eq!(yc_family_set_cone(fam, ptr::null(), 0, ray.as_ptr()), YcStatus::Ok);
        assert_eq!(yc_certify(fam, &mut rep), YcStatus::Ok);
        yc_report_verdict(rep, &mut v);
        assert_eq!(v, YcVerdict::Certified);
        yc_report_free(rep);

        // Explicitly empty cone: only the origin, trivially certified.
        assert_eq!(yc_family_set_cone(fam, ptr::null(), 0, ptr::null()), YcStatus::Ok);
        assert_eq!(yc_certify(fam, &mut rep), YcStatus::Ok);
        yc_report_verdict(rep, &mut v);
        assert_eq!(v, YcVerdict::Certified);
        let mut json = ptr::null_mut();
        assert_eq!(yc_family_to_json(fam, &mut json), YcStatus::Ok);
        assert!(take_string(json).contains("\"cone\""));
        yc_report_free(rep);
        yc_family_free(fam);
    }
}

#[test]
fn theorem4_and_rank() {
    unsafe {
        let fam = family(2, &EX1);
        let mut rep = ptr::null_mut();
        let mut v = YcVerdict::Refuted;
        assert_eq!(yc_theorem4_certificate(fam, &mut rep), YcStatus::Ok);
        yc_report_verdict(rep, &mut v);
        assert_eq!(v, YcVerdict::Certified);
        yc_report_free(rep);
        yc_family_free(fam);

        let rank3 = family(2, &[&[1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 1.0], &[0.0, 1.0, 1.0, 0.0]]);
        assert_eq!(yc_theorem4_certificate(rank3, &mut rep), YcStatus::Ok);
        yc_report_verdict(rep, &mut v);
        assert_eq!(v, YcVerdict::HypothesisViolated);
        yc_report_free(rep);
        yc_family_free(rank3);

        let nonsym = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0];
        let mut rank = 0;
        assert_eq!(yc_matrix_set_rank(nonsym.as_ptr(), 2, 3, 1e-9, &mut rank), YcStatus::Ok);
        assert_eq!(rank, 3);
        assert_eq!(yc_matrix_set_rank(nonsym.as_ptr(), 2, 3, -1.0, &mut rank), YcStatus::InvalidInput);
    }
}

#[test]
fn errors_and_null_handling() {
    unsafe {
        let mut fam = ptr::null_mut();
        assert_eq!(yc_family_new(0, &mut fam), YcStatus::InvalidInput);
        assert_eq!(yc_family_new(2, ptr::null_mut()), YcStatus::NullPointer);
        assert_eq!(yc_family_push(ptr::null_mut(), [0.0; 4].as_ptr()), YcStatus::NullPointer);
        assert!(last_error().contains("family"));

        let fam = family(2, &[]);
        assert_eq!(yc_family_push(fam, [1.0, 2.0, 3.0, 4.0].as_ptr()), YcStatus::InvalidInput);
        assert_eq!(yc_family_push(fam, [1.0, f64::NAN, f64::NAN, 4.0].as_ptr()), YcStatus::InvalidInput);
        assert_eq!(yc_family_push(fam, ptr::null()), YcStatus::NullPointer);
        assert_eq!(yc_family_len(fam), 0);

        let mut rep = ptr::null_mut();
        assert_eq!(yc_certify(fam, &mut rep), YcStatus::InvalidInput, "empty family");
        assert!(rep.is_null());
        assert_eq!(yc_family_push(fam, [1.0, 0.0, 0.0, 1.0].as_ptr()), YcStatus::Ok);
        assert!(yc_last_error().is_null(), "success clears the error");

        let bad_ray = [0.0, 0.0, 0.0];
        assert_eq!(yc_family_set_cone(fam, ptr::null(), 1, bad_ray.as_ptr()), YcStatus::NullPointer);

        yc_family_free(fam);
        yc_family_free(ptr::null_mut());
        yc_report_free(ptr::null_mut());
        yc_string_free(ptr::null_mut());
    }
}

#[test]
fn report_json_verifies_with_the_cli() {
    let fam = family(2, &EX1);
    let dir = std::env::temp_dir().join(format!("yuancert-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    unsafe {
        let mut json = ptr::null_mut();
        assert_eq!(yc_family_to_json(fam, &mut json), YcStatus::Ok);
        std::fs::write(dir.join("instance.json"), take_string(json)).unwrap();

        let mut rep = ptr::null_mut();
        assert_eq!(yc_certify(fam, &mut rep), YcStatus::Ok);
        assert_eq!(yc_report_to_json(rep, &mut json), YcStatus::Ok);
        let report = take_string(json);
        std::fs::write(dir.join("report.json"), &report).unwrap();
        let parsed: yuancert::io::ReportFile = serde_json::from_str(&report).unwrap();
        assert_eq!(parsed.verdict, yuancert::io::Verdict::Certified);
        yc_report_free(rep);
        yc_family_free(fam);
    }
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = yuancert::cli::run(
        [
            "yuancert".as_ref(),
            "verify-report".as_ref(),
            dir.join("instance.json").as_os_str(),
            dir.join("report.json").as_os_str(),
        ],
        &mut out,
        &mut err,
    );
    std::fs::remove_dir_all(&dir).ok();
    assert_eq!(code, 0, "{}{}", String::from_utf8_lossy(&out), String::from_utf8_lossy(&err));
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(yc_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

/// Compiles `tests/c/smoke.c` against the generated header and the static
/// library, then runs it.
#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler on PATH");
        return;
    }
    let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    // Cargo builds the library's static archive next to the test binaries.
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let staticlib = deps.join("libyuancert_ffi.a");
    assert!(staticlib.exists(), "{} not built", staticlib.display());
    let exe = std::path::PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("yuancert_smoke");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Wextra", "-Werror", "-o"])
        .arg(&exe)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&staticlib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}

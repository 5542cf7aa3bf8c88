//! Command-line front end. `run` is the whole program; the binary only
//! forwards `std::env::args` and exits with its return value.
//!
//! Exit codes: 0 certified or verified, 1 refuted, 2 hypothesis violated,
//! 3 input error, 4 numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::cone::{cone_contains, restrict_to_cone, FirstOrderCone};
use crate::error::{input, Error, Result};
use crate::io::{
    read_instance, to_json, ConeSpec, InstanceFile, MultiplierSpec, OracleSummary, Payload, ReportFile, Verdict,
};
use crate::linalg::{matrix_set_rank, max_abs, quad_form, sym_eigen, MatrixFamily, SetRank, DEFAULT_TOL};
use crate::nlp::{
    check_mfcq, critical_cone_lineality, gsc_from_vertices, lagrangian_gradient, lagrangian_hessian,
    multiplier_vertices, second_order_certificate, KktData, MultiplierPoint,
};
use crate::oracle::{
    cross_check, hull_psd_search, sample_max_nonneg, simplex_grid_search, SampleVerdict, DEFAULT_ORACLE_SAMPLES,
    DEFAULT_RESOLUTION,
};
use crate::quadprob::{theorem4_certificate_with, to_kkt, QuadProblem, DEFAULT_RADIUS, DEFAULT_SAMPLES, DEFAULT_SEED};
use crate::yuan::{certify_rank2_with_tol, combined_lambda_min, yuan_two, CERTIFICATE_TOL};

pub const EXIT_CERTIFIED: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Agreement required between a report's `lambda_min` and a recomputation.
pub const VERIFY_TOL: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "yuancert", version, about = "Certificates for max-of-quadratic-forms conditions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Rank / PSD tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true, default_value_t = DEFAULT_RESOLUTION)]
    resolution: usize,
    /// JSON file with `subspace` rows and an optional `ray`; overrides the
    /// cone in the instance.
    #[arg(long, global = true)]
    cone: Option<PathBuf>,
    /// Print the machine-readable report instead of a summary.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Two-matrix certificate or refutation.
    Yuan2 { input: PathBuf },
    /// Family certificate for set rank at most two.
    Certify { input: PathBuf },
    /// Set rank with basis and coefficients.
    Rank { input: PathBuf },
    /// Vertices of the Lagrange multiplier set.
    Vertices { input: PathBuf },
    /// Single-multiplier second-order certificate.
    Soc { input: PathBuf },
    /// Certificate for the quadratically constrained problem.
    Quad { input: PathBuf },
    /// Cross-check a family certificate against brute-force searches.
    Oracle { input: PathBuf },
    /// Recompute a report's claim from its instance.
    VerifyReport { input: PathBuf, report: PathBuf },
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Input(_)
        | Error::NotInSpan { .. }
        | Error::DegenerateBasis
        | Error::ConeNotCritical(_)
        | Error::DegenerateDelta(_) => EXIT_INPUT,
        Error::HypothesisViolated(_) | Error::MfcqFailed | Error::EmptyMultiplierSet | Error::UnboundedDetected => {
            EXIT_HYPOTHESIS
        }
        Error::NumericalFailure(_) | Error::Infeasible | Error::Unbounded => EXIT_NUMERICAL,
    }
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Certified | Verdict::Ok => EXIT_CERTIFIED,
        Verdict::Refuted => EXIT_REFUTED,
        Verdict::HypothesisViolated => EXIT_HYPOTHESIS,
        Verdict::Error => EXIT_NUMERICAL,
    }
}

/// Parses `args` (including the program name), runs one command, writes the
/// report to `out` and diagnostics to `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_CERTIFIED };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let (name, input) = match &cli.command {
        Command::Yuan2 { input } => ("yuan2", input),
        Command::Certify { input } => ("certify", input),
        Command::Rank { input } => ("rank", input),
        Command::Vertices { input } => ("vertices", input),
        Command::Soc { input } => ("soc", input),
        Command::Quad { input } => ("quad", input),
        Command::Oracle { input } => ("oracle", input),
        Command::VerifyReport { input, .. } => ("verify-report", input),
    };
    let result = read_instance(input).and_then(|(inst, digest)| dispatch(&cli, &inst, &digest));
    match result {
        Ok(report) => {
            emit(&cli, &report, out);
            if report.verdict == Verdict::Error {
                if let Some(r) = &report.reason {
                    let _ = writeln!(err, "error: {r}");
                }
            }
            verdict_code(report.verdict)
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if cli.json {
                let mut report = ReportFile::new(name, Verdict::Error, "");
                report.reason = Some(e.to_string());
                emit(&cli, &report, out);
            }
            exit_code(&e)
        }
    }
}

fn emit(cli: &Cli, report: &ReportFile, out: &mut dyn Write) {
    if cli.json {
        let _ = writeln!(out, "{}", to_json(report));
    } else {
        let _ = write!(out, "{}", summary(report));
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.10}")).collect();
    format!("[{}]", parts.join(", "))
}

fn summary(r: &ReportFile) -> String {
    let verdict = match r.verdict {
        Verdict::Certified => "certified",
        Verdict::Refuted => "refuted",
        Verdict::HypothesisViolated => "hypothesis violated",
        Verdict::Ok => "ok",
        Verdict::Error => "error",
    };
    let mut s = format!("{}: {verdict}\n", r.command);
    if let Some(rank) = r.rank {
        s += &format!("rank: {rank}\n");
    }
    if let Some(b) = &r.basis {
        s += &format!("basis: {b:?}\n");
    }
    if let Some(c) = &r.coefficients {
        for (i, p) in c.iter().enumerate() {
            s += &format!("  A{i} = {:.10} B1 + {:.10} B2\n", p[0], p[1]);
        }
    }
    if let Some(w) = &r.weights {
        s += &format!("weights: {}\n", fmt_vec(w));
    }
    if let Some(m) = &r.multiplier {
        s += &format!("multiplier: lambda = {}, mu = {}\n", fmt_vec(&m.lambda), fmt_vec(&m.mu));
    }
    if let Some(l) = r.lambda_min {
        s += &format!("lambda_min: {l:.12e}\n");
    }
    if let Some(w) = &r.witness {
        s += &format!("witness: {}\n", fmt_vec(w));
    }
    if let Some(f) = &r.form_values {
        s += &format!("form values: {}\n", fmt_vec(f));
    }
    if let Some(vs) = &r.vertices {
        s += &format!("vertices: {}\n", vs.len());
        for v in vs {
            s += &format!("  lambda = {}, mu = {}\n", fmt_vec(&v.lambda), fmt_vec(&v.mu));
        }
    }
    if let Some(o) = &r.oracle {
        s += &format!(
            "oracle: sampling {}, grid lambda_min {:.6e}{}, consistent: {}\n",
            if o.sample_witness.is_some() { "found a witness" } else { "found no witness" },
            o.grid_lambda_min,
            o.hull_lambda_min.map(|h| format!(", hull lambda_min {h:.6e}")).unwrap_or_default(),
            o.consistent
        );
    }
    if let Some(reason) = &r.reason {
        s += &format!("reason: {reason}\n");
    }
    s
}

fn cone_override(cli: &Cli, n: usize) -> Result<Option<FirstOrderCone>> {
    let Some(path) = &cli.cone else { return Ok(None) };
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let spec: ConeSpec = serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", path.display())))?;
    spec.to_cone(n).map(Some)
}

fn family_input(cli: &Cli, inst: &InstanceFile) -> Result<(MatrixFamily, FirstOrderCone)> {
    let Payload::Family(p) = &inst.payload else {
        return Err(input("expected an instance of kind \"family\""));
    };
    let family = p.family()?;
    let cone = match cone_override(cli, family.order())? {
        Some(c) => c,
        None => p.cone(family.order())?,
    };
    Ok((family, cone))
}

fn kkt_input(cli: &Cli, inst: &InstanceFile) -> Result<(KktData, Option<FirstOrderCone>)> {
    let (data, cone) = match &inst.payload {
        Payload::Kkt(p) => {
            let data = p.data()?;
            let cone = p.cone(data.n())?;
            (data, cone)
        }
        Payload::Quadprob(p) => (to_kkt(&p.problem()?)?, None),
        Payload::Family(_) => return Err(input("expected an instance of kind \"kkt\" or \"quadprob\"")),
    };
    let cone = match cone_override(cli, data.n())? {
        Some(c) => Some(c),
        None => cone,
    };
    Ok((data, cone))
}

fn quad_input(inst: &InstanceFile) -> Result<QuadProblem> {
    match &inst.payload {
        Payload::Quadprob(p) => p.problem(),
        _ => Err(input("expected an instance of kind \"quadprob\"")),
    }
}

fn rank_report(rank: &SetRank, digest: &str) -> ReportFile {
    let mut r = ReportFile::new("rank", Verdict::Ok, digest);
    r.rank = Some(rank.rank);
    r.basis = Some(rank.basis.clone());
    if let Some(d) = &rank.dependence {
        r.coefficients = Some(d.coefficients.iter().map(|&(a, b)| [a, b]).collect());
        r.residuals.insert("max_residual".into(), d.max_residual);
    }
    r
}

fn dispatch(cli: &Cli, inst: &InstanceFile, digest: &str) -> Result<ReportFile> {
    match &cli.command {
        Command::Yuan2 { .. } => {
            let (family, cone) = family_input(cli, inst)?;
            if family.len() != 2 {
                return Err(input(format!("yuan2 needs exactly two matrices, got {}", family.len())));
            }
            let m = family.members();
            let report = yuan_two(&m[0], &m[1], &cone)?;
            Ok(ReportFile::from_certificate("yuan2", &report, digest))
        }
        Command::Certify { .. } => {
            let (family, cone) = family_input(cli, inst)?;
            let report = certify_rank2_with_tol(&family, &cone, cli.tol)?;
            Ok(ReportFile::from_certificate("certify", &report, digest))
        }
        Command::Rank { .. } => {
            let Payload::Family(p) = &inst.payload else {
                return Err(input("expected an instance of kind \"family\""));
            };
            let rank = if p.symmetric {
                matrix_set_rank(p.family()?.members(), cli.tol)?
            } else {
                matrix_set_rank(&p.general()?, cli.tol)?
            };
            Ok(rank_report(&rank, digest))
        }
        Command::Vertices { .. } => {
            let (data, _) = kkt_input(cli, inst)?;
            let vertices = multiplier_vertices(&data)?;
            let gsc = gsc_from_vertices(&data, &vertices);
            let mut r = ReportFile::new("vertices", Verdict::Ok, digest);
            r.vertices = Some(vertices.iter().map(MultiplierSpec::from).collect());
            r.residuals.insert("mfcq".into(), f64::from(u8::from(check_mfcq(&data)?)));
            r.residuals.insert("gsc".into(), f64::from(u8::from(gsc.holds)));
            r.residuals.insert("gsc_always_zero".into(), gsc.always_zero.len() as f64);
            r.residuals.insert("lineality_dim".into(), critical_cone_lineality(&data).len() as f64);
            Ok(r)
        }
        Command::Soc { .. } => {
            let (data, cone) = kkt_input(cli, inst)?;
            let cert = second_order_certificate(&data, cone.as_ref())?;
            let mut r = ReportFile::from_certificate("soc", &cert.report, digest);
            r.multiplier = cert.multiplier.as_ref().map(MultiplierSpec::from);
            r.vertices = Some(cert.vertices.iter().map(MultiplierSpec::from).collect());
            r.cone = Some(ConeSpec::from_cone(&cert.cone));
            Ok(r)
        }
        Command::Quad { .. } => {
            let prob = quad_input(inst)?;
            let report = theorem4_certificate_with(
                &prob,
                cli.samples.unwrap_or(DEFAULT_SAMPLES),
                DEFAULT_RADIUS,
                cli.seed.unwrap_or(DEFAULT_SEED),
                cli.tol,
            )?;
            Ok(ReportFile::from_certificate("quad", &report, digest))
        }
        Command::Oracle { .. } => {
            let (family, cone) = family_input(cli, inst)?;
            let report = certify_rank2_with_tol(&family, &cone, cli.tol)?;
            let samples = cli.samples.unwrap_or(DEFAULT_ORACLE_SAMPLES);
            let sample = sample_max_nonneg(&family, &cone, samples, cli.seed.unwrap_or(DEFAULT_SEED))?;
            let grid = simplex_grid_search(&family, &cone, cli.resolution)?;
            let hull = match hull_psd_search(&family, &cone) {
                Ok(h) => Some(h),
                Err(Error::HypothesisViolated(_)) => None,
                Err(e) => return Err(e),
            };
            let check = cross_check(&family, &report, &sample, &grid, hull.as_ref());
            let mut r = ReportFile::from_certificate("oracle", &report, digest);
            r.oracle = Some(OracleSummary {
                sample_witness: match &sample {
                    SampleVerdict::Witness { x, .. } => Some(x.clone()),
                    SampleVerdict::NoWitnessFound => None,
                },
                grid_weights: grid.weights.as_slice().to_vec(),
                grid_lambda_min: grid.lambda_min,
                hull_weights: hull.as_ref().map(|h| h.weights.as_slice().to_vec()),
                hull_lambda_min: hull.as_ref().map(|h| h.lambda_min),
                consistent: check.is_ok(),
            });
            if let Err(why) = check {
                r.verdict = Verdict::Error;
                r.reason = Some(format!("oracle disagreement: {why}"));
            }
            Ok(r)
        }
        Command::VerifyReport { report, .. } => verify_report(cli, inst, digest, report),
    }
}

fn read_report(path: &Path) -> Result<ReportFile> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| input(format!("{}: {e}", path.display())))
}

/// Family and cone a family-style report refers to.
fn report_family(cli: &Cli, inst: &InstanceFile, report: &ReportFile) -> Result<(MatrixFamily, FirstOrderCone)> {
    match report.command.as_str() {
        "quad" => {
            let prob = quad_input(inst)?;
            let n = prob.n();
            Ok((prob.matrices().clone(), FirstOrderCone::full(n)))
        }
        "yuan2" | "certify" | "oracle" => {
            let (family, cone) = family_input(cli, inst)?;
            let cone = match &report.cone {
                Some(c) => c.to_cone(family.order())?,
                None => cone,
            };
            Ok((family, cone))
        }
        other => Err(input(format!("cannot verify a report of command {other:?}"))),
    }
}

fn verify_report(cli: &Cli, inst: &InstanceFile, digest: &str, path: &Path) -> Result<ReportFile> {
    let claimed = read_report(path)?;
    if claimed.input_digest != digest {
        return Err(input("report was produced for a different input (digest mismatch)"));
    }
    let mut out = ReportFile::new("verify-report", Verdict::Certified, digest);
    let fail = |mut r: ReportFile, why: String| {
        r.verdict = Verdict::Refuted;
        r.reason = Some(why);
        Ok(r)
    };
    match claimed.verdict {
        Verdict::Certified => {
            let weights = claimed.weights.as_ref().ok_or_else(|| input("certified report has no weights"))?;
            let claimed_lm = claimed.lambda_min.ok_or_else(|| input("certified report has no lambda_min"))?;
            let sum: f64 = weights.iter().sum();
            if (sum - 1.0).abs() > 1e-12 || weights.iter().any(|&w| w < 0.0) {
                return fail(out, format!("weights are not in the simplex (sum {sum})"));
            }
            let (lambda_min, scale) = if claimed.command == "soc" {
                let (data, _) = kkt_input(cli, inst)?;
                let cone = claimed.cone.as_ref().ok_or_else(|| input("soc report has no cone"))?.to_cone(data.n())?;
                let point: MultiplierPoint =
                    claimed.multiplier.as_ref().ok_or_else(|| input("soc report has no multiplier"))?.into();
                let hessian = lagrangian_hessian(&data, &point)?;
                let stationarity = max_abs(&lagrangian_gradient(&data, &point)?);
                out.residuals.insert("stationarity".into(), stationarity);
                if point.mu.iter().any(|&m| m < 0.0) {
                    return fail(out, "multiplier has a negative inequality component".into());
                }
                let lm = match restrict_to_cone(&hessian, &cone)? {
                    Some(r) => sym_eigen(&r)?.min(),
                    None => 0.0,
                };
                (lm, 1.0 + hessian.max_abs())
            } else {
                let (family, cone) = report_family(cli, inst, &claimed)?;
                if weights.len() != family.len() {
                    return fail(out, "weight count differs from family size".into());
                }
                (combined_lambda_min(&family, &cone, weights)?, family.scale())
            };
            out.lambda_min = Some(lambda_min);
            out.residuals.insert("lambda_min_difference".into(), (lambda_min - claimed_lm).abs());
            if (lambda_min - claimed_lm).abs() > VERIFY_TOL * scale {
                return fail(out, format!("recomputed lambda_min {lambda_min:e} differs from reported {claimed_lm:e}"));
            }
            if lambda_min < -CERTIFICATE_TOL * scale {
                return fail(out, format!("combination is not PSD on the cone (lambda_min {lambda_min:e})"));
            }
            Ok(out)
        }
        Verdict::Refuted => {
            let witness = claimed.witness.as_ref().ok_or_else(|| input("refuted report has no witness"))?;
            let (family, cone) = report_family(cli, inst, &claimed)?;
            if !cone_contains(&cone, witness, 1e-9 * (1.0 + max_abs(witness))) {
                return fail(out, "witness is not in the cone".into());
            }
            let values: Vec<f64> = family.members().iter().map(|a| quad_form(a, witness)).collect::<Result<_>>()?;
            out.witness = Some(witness.clone());
            out.form_values = Some(values.clone());
            if let Some(v) = values.iter().find(|&&v| v >= 0.0) {
                return fail(out, format!("form value {v:e} at the witness is not negative"));
            }
            Ok(out)
        }
        Verdict::Ok if claimed.command == "rank" => {
            let Payload::Family(p) = &inst.payload else {
                return Err(input("expected an instance of kind \"family\""));
            };
            let rank = if p.symmetric {
                matrix_set_rank(p.family()?.members(), cli.tol)?
            } else {
                matrix_set_rank(&p.general()?, cli.tol)?
            };
            out.rank = Some(rank.rank);
            if Some(rank.rank) != claimed.rank {
                return fail(out, format!("recomputed rank {} differs from reported {:?}", rank.rank, claimed.rank));
            }
            Ok(out)
        }
        other => Err(input(format!("nothing to verify in a report with verdict {other:?}"))),
    }
}

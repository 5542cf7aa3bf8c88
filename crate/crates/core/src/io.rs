//! Instance and report files.
//!
//! An instance is one JSON document:
//!
//! ```json
//! { "schema_version": "1", "kind": "family", "payload": { "matrices": [[[1, 0], [0, -1]]] } }
//! ```
//!
//! Matrices are arrays of rows. Indices (`active`) are zero-based. Floats are
//! written with 17 significant digits so a parse/serialize cycle is exact.

use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::path::Path;

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::ser::{Formatter, PrettyFormatter};
use sha2::{Digest, Sha256};

use crate::cone::FirstOrderCone;
use crate::error::{input, Result};
use crate::linalg::{Matrix, MatrixFamily, SymMatrix};
use crate::nlp::{KktData, KktSpec, MultiplierPoint};
use crate::quadprob::QuadProblem;
use crate::yuan::{CertificateReport, Outcome};

pub const SCHEMA_VERSION: &str = "1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Rows = Vec<Vec<f64>>;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeSpec {
    #[serde(default)]
    pub subspace: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient_dim: Option<usize>,
}

impl ConeSpec {
    pub fn to_cone(&self, n: usize) -> Result<FirstOrderCone> {
        if let Some(d) = self.ambient_dim {
            if d != n {
                return Err(input(format!("cone ambient_dim {d} differs from problem dimension {n}")));
            }
        }
        FirstOrderCone::new(n, &self.subspace, self.ray.as_deref())
    }

    pub fn from_cone(cone: &FirstOrderCone) -> Self {
        ConeSpec {
            subspace: cone.subspace_basis().to_vec(),
            ray: cone.ray().map(<[f64]>::to_vec),
            ambient_dim: Some(cone.ambient_dim()),
        }
    }
}

fn yes() -> bool {
    true
}

fn minus_one() -> f64 {
    -1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyPayload {
    pub matrices: Vec<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone: Option<ConeSpec>,
    #[serde(default = "yes")]
    pub symmetric: bool,
}

impl FamilyPayload {
    pub fn family(&self) -> Result<MatrixFamily> {
        if !self.symmetric {
            return Err(input("this command needs a symmetric family"));
        }
        let members = self
            .matrices
            .iter()
            .enumerate()
            .map(|(i, rows)| SymMatrix::from_rows(rows).map_err(|e| input(format!("matrices[{i}]: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        MatrixFamily::new(members)
    }

    pub fn general(&self) -> Result<Vec<Matrix>> {
        let mats = self
            .matrices
            .iter()
            .enumerate()
            .map(|(i, rows)| {
                let m = Matrix::from_rows(rows).map_err(|e| input(format!("matrices[{i}]: {e}")))?;
                if !m.is_square() {
                    return Err(input(format!("matrices[{i}] is not square")));
                }
                if !m.max_abs().is_finite() {
                    return Err(input(format!("matrices[{i}] has non-finite entries")));
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        let Some(n) = mats.first().map(Matrix::rows) else {
            return Err(input("family is empty"));
        };
        if mats.iter().any(|m| m.rows() != n) {
            return Err(input("matrices differ in order"));
        }
        Ok(mats)
    }

    /// The declared cone, or `ℝⁿ`.
    pub fn cone(&self, n: usize) -> Result<FirstOrderCone> {
        match &self.cone {
            Some(c) => c.to_cone(n),
            None => Ok(FirstOrderCone::full(n)),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KktPayload {
    pub grad_f: Vec<f64>,
    #[serde(default)]
    pub grad_h: Vec<Vec<f64>>,
    #[serde(default)]
    pub grad_g: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hess_f: Option<Rows>,
    #[serde(default)]
    pub hess_h: Vec<Rows>,
    #[serde(default)]
    pub hess_g: Vec<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone: Option<ConeSpec>,
}

fn sym_field(name: &str, rows: &Rows) -> Result<SymMatrix> {
    SymMatrix::from_rows(rows).map_err(|e| input(format!("{name}: {e}")))
}

impl KktPayload {
    pub fn data(&self) -> Result<KktData> {
        let hess = |name: &str, list: &[Rows]| -> Result<Vec<SymMatrix>> {
            list.iter().enumerate().map(|(i, r)| sym_field(&format!("{name}[{i}]"), r)).collect()
        };
        KktData::new(KktSpec {
            grad_f: self.grad_f.clone(),
            grad_h: self.grad_h.clone(),
            grad_g: self.grad_g.clone(),
            hess_f: self.hess_f.as_ref().map(|r| sym_field("hess_f", r)).transpose()?,
            hess_h: hess("hess_h", &self.hess_h)?,
            hess_g: hess("hess_g", &self.hess_g)?,
            active: self.active.clone(),
            g_values: self.g_values.clone(),
        })
    }

    pub fn cone(&self, n: usize) -> Result<Option<FirstOrderCone>> {
        self.cone.as_ref().map(|c| c.to_cone(n)).transpose()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadPayload {
    pub matrices: Vec<Rows>,
    #[serde(default = "minus_one")]
    pub ray_constant: f64,
}

impl QuadPayload {
    pub fn problem(&self) -> Result<QuadProblem> {
        let family = FamilyPayload { matrices: self.matrices.clone(), cone: None, symmetric: true }.family()?;
        QuadProblem::new(family, self.ray_constant)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Family,
    Kkt,
    Quadprob,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    Family(FamilyPayload),
    Kkt(KktPayload),
    Quadprob(QuadPayload),
}

impl Payload {
    pub fn kind(&self) -> Kind {
        match self {
            Payload::Family(_) => Kind::Family,
            Payload::Kkt(_) => Kind::Kkt,
            Payload::Quadprob(_) => Kind::Quadprob,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceFile {
    pub schema_version: String,
    pub payload: Payload,
}

impl InstanceFile {
    pub fn new(payload: Payload) -> Self {
        InstanceFile { schema_version: SCHEMA_VERSION.into(), payload }
    }
}

impl Serialize for InstanceFile {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("InstanceFile", 3)?;
        st.serialize_field("schema_version", &self.schema_version)?;
        st.serialize_field("kind", &self.payload.kind())?;
        match &self.payload {
            Payload::Family(p) => st.serialize_field("payload", p)?,
            Payload::Kkt(p) => st.serialize_field("payload", p)?,
            Payload::Quadprob(p) => st.serialize_field("payload", p)?,
        }
        st.end()
    }
}

// Hand-written so the payload is decoded in place once `kind` is known; errors
// inside the payload then keep their line and column.
impl<'de> Deserialize<'de> for InstanceFile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = InstanceFile;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an instance object with schema_version, kind and payload")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<InstanceFile, A::Error> {
                let mut version: Option<String> = None;
                let mut kind: Option<Kind> = None;
                let mut payload: Option<Payload> = None;
                let mut deferred: Option<serde_json::Value> = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "schema_version" => version = Some(map.next_value()?),
                        "kind" => kind = Some(map.next_value()?),
                        "payload" => match kind {
                            Some(Kind::Family) => payload = Some(Payload::Family(map.next_value()?)),
                            Some(Kind::Kkt) => payload = Some(Payload::Kkt(map.next_value()?)),
                            Some(Kind::Quadprob) => payload = Some(Payload::Quadprob(map.next_value()?)),
                            None => deferred = Some(map.next_value()?),
                        },
                        other => return Err(de::Error::unknown_field(other, &["schema_version", "kind", "payload"])),
                    }
                }
                let version = version.ok_or_else(|| de::Error::missing_field("schema_version"))?;
                if version != SCHEMA_VERSION {
                    return Err(de::Error::custom(format!(
                        "unsupported schema_version {version:?} (expected {SCHEMA_VERSION:?})"
                    )));
                }
                let kind = kind.ok_or_else(|| de::Error::missing_field("kind"))?;
                let payload = match (payload, deferred) {
                    (Some(p), _) => p,
                    (None, Some(v)) => {
                        let r = match kind {
                            Kind::Family => serde_json::from_value(v).map(Payload::Family),
                            Kind::Kkt => serde_json::from_value(v).map(Payload::Kkt),
                            Kind::Quadprob => serde_json::from_value(v).map(Payload::Quadprob),
                        };
                        r.map_err(|e| de::Error::custom(format!("payload: {e}")))?
                    }
                    (None, None) => return Err(de::Error::missing_field("payload")),
                };
                Ok(InstanceFile { schema_version: version, payload })
            }
        }
        d.deserialize_map(V)
    }
}

pub fn parse_instance(text: &str) -> Result<InstanceFile> {
    serde_json::from_str(text).map_err(|e| input(e.to_string()))
}

/// Lowercase hex SHA-256 of `bytes`.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reads and parses an instance; returns it with the digest of the raw bytes.
pub fn read_instance(path: &Path) -> Result<(InstanceFile, String)> {
    let bytes = std::fs::read(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let inst = serde_json::from_str(text).map_err(|e| input(format!("{}: {e}", path.display())))?;
    Ok((inst, digest(&bytes)))
}

/// Pretty printer that writes every float with 17 significant digits.
struct ExactFloats<'a>(PrettyFormatter<'a>);

impl Formatter for ExactFloats<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value` as pretty JSON with 17-significant-digit floats.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory serialization cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Refuted,
    HypothesisViolated,
    /// Informational commands (`rank`, `vertices`) that certify nothing.
    Ok,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierSpec {
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
}

impl From<&MultiplierPoint> for MultiplierSpec {
    fn from(p: &MultiplierPoint) -> Self {
        MultiplierSpec { lambda: p.lambda.clone(), mu: p.mu.clone() }
    }
}

impl From<&MultiplierSpec> for MultiplierPoint {
    fn from(p: &MultiplierSpec) -> Self {
        MultiplierPoint { lambda: p.lambda.clone(), mu: p.mu.clone() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub sample_witness: Option<Vec<f64>>,
    pub grid_weights: Vec<f64>,
    pub grid_lambda_min: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hull_weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hull_lambda_min: Option<f64>,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub command: String,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplier: Option<MultiplierSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<MultiplierSpec>>,
    /// The cone the verdict refers to, when it is not the one in the input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone: Option<ConeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default)]
    pub residuals: BTreeMap<String, f64>,
    pub tool_version: String,
    pub input_digest: String,
}

impl ReportFile {
    pub fn new(command: &str, verdict: Verdict, input_digest: &str) -> Self {
        ReportFile {
            command: command.into(),
            verdict,
            weights: None,
            multiplier: None,
            witness: None,
            form_values: None,
            lambda_min: None,
            rank: None,
            basis: None,
            coefficients: None,
            vertices: None,
            cone: None,
            oracle: None,
            reason: None,
            residuals: BTreeMap::new(),
            tool_version: TOOL_VERSION.into(),
            input_digest: input_digest.into(),
        }
    }

    pub fn from_certificate(command: &str, report: &CertificateReport, input_digest: &str) -> Self {
        let mut out = match &report.outcome {
            Outcome::Certified { weights, lambda_min } => {
                let mut r = ReportFile::new(command, Verdict::Certified, input_digest);
                r.weights = Some(weights.as_slice().to_vec());
                r.lambda_min = Some(*lambda_min);
                r
            }
            Outcome::Refuted { witness, form_values } => {
                let mut r = ReportFile::new(command, Verdict::Refuted, input_digest);
                r.witness = Some(witness.clone());
                r.form_values = Some(form_values.clone());
                r
            }
            Outcome::HypothesisViolated { reason } => {
                let mut r = ReportFile::new(command, Verdict::HypothesisViolated, input_digest);
                r.reason = Some(reason.clone());
                r
            }
        };
        out.residuals = report.residuals.iter().filter(|(_, v)| v.is_finite()).map(|(k, v)| (k.clone(), *v)).collect();
        out
    }
}

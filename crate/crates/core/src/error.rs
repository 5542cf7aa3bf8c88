use thiserror::Error;

/// Failures raised by the certificate machinery.
///
/// Outcomes that are part of the mathematics (a refuting direction, a family
/// whose rank exceeds two) are *not* errors; they are reported through
/// [`crate::yuan::Outcome`]. The variants here are malformed input,
/// precondition failures and numerical breakdowns.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("matrix is not in the span of the basis pair (residual {residual:.3e})")]
    NotInSpan { residual: f64 },

    #[error("basis pair is linearly dependent")]
    DegenerateBasis,

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("Mangasarian-Fromovitz constraint qualification fails at the given point")]
    MfcqFailed,

    #[error("supplied cone is not contained in the critical cone: {0}")]
    ConeNotCritical(String),

    #[error("Lagrange multiplier set is empty")]
    EmptyMultiplierSet,

    #[error("Lagrange multiplier set is unbounded")]
    UnboundedDetected,

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("dependence coefficient {0} is too close to -1")]
    DegenerateDelta(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<S: Into<String>>(msg: S) -> Error {
    Error::Input(msg.into())
}

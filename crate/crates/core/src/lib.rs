//! Certificates for nonnegativity of the maximum of quadratic forms on
//! first-order cones, and single-multiplier second-order optimality
//! certificates built on them.
//!
//! The crate is organized bottom-up:
//!
//! * [`linalg`] — symmetric matrices, Jacobi eigendecomposition, PSD tests,
//!   rank of a set of matrices.
//! * [`cone`] — first-order cones and restriction to their span.
//! * [`yuan`] — the two-matrix solver and the rank-≤2 family certifier.
//! * [`nlp`] — KKT data at a candidate point: multiplier polytope, MFCQ,
//!   critical-cone lineality and the second-order certificate.
//! * [`quadprob`] — the quadratically-constrained problem class
//!   `min z s.t. ½xᵀAᵢx − z ≤ 0`.
//! * [`oracle`] — brute-force verifiers used to cross-check the above.
//! * [`io`] and [`cli`] — instance/report files and the command-line tool.

// `!(x >= 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cone;
pub mod error;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod nlp;
pub mod oracle;
pub mod quadprob;
mod sample;
#[cfg(test)]
mod testing;
pub mod yuan;

pub use cone::FirstOrderCone;
pub use error::{Error, Result};
pub use linalg::{Matrix, MatrixFamily, SymMatrix};
pub use yuan::{certify_rank2, yuan_two, CertificateReport, Outcome, SimplexWeights};

//! Error taxonomy shared by the whole crate.
//!
//! Errors fall into three classes with distinct process exit codes when they
//! surface through the command-line front end:
//!
//! * [`QesError::Domain`] — an argument lies outside the mathematical domain
//!   of an operation (modulus out of range, coordinate at a singular point,
//!   grid too small, …).  Exit code 2.
//! * [`QesError::Constraint`] — the inputs are individually valid but violate
//!   a model-level admissibility condition (no algebraizable sector, unmet
//!   parameter restriction, unsupported limit, …).  Exit code 2.
//! * [`QesError::Numerical`] — an iterative procedure failed to converge or
//!   produced unusable output (root finder stalled, quadrature exhausted its
//!   refinement budget, …).  Exit code 3.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum QesError {
    /// Input outside the mathematical domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Inputs violate a model-level admissibility or usage constraint.
    #[error("constraint error: {0}")]
    Constraint(String),
    /// An iterative numerical procedure failed to converge.
    #[error("numerical error: {0}")]
    Numerical(String),
}

impl QesError {
    /// Process exit code associated with this error class: usage and
    /// constraint problems exit 2, numerical failures exit 3.
    #[must_use]
    pub fn exit_code(&self) -> i32 {
        match self {
            QesError::Domain(_) | QesError::Constraint(_) => 2,
            QesError::Numerical(_) => 3,
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, QesError>;

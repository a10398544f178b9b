//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by constructors and evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A constructor or operation precondition was violated.
    #[error("invalid parameter `{name}`: {detail}")]
    InvalidParameter {
        /// Name of the offending parameter.
        name: &'static str,
        /// Human-readable description of the violation.
        detail: String,
    },

    /// Pointwise evaluation was requested for a delta-resonance
    /// polarizability, which is only meaningful under an integral sign.
    /// Use the closed forms in [`crate::resonance`] instead.
    #[error("pointwise evaluation is undefined for a delta-resonance polarizability")]
    DeltaNotPointwise,

    /// A quadrature-backed evaluation failed to reach its tolerance and the
    /// caller demanded a converged value.
    #[error("quadrature did not converge: {context}")]
    Unconverged {
        /// What was being integrated when convergence failed.
        context: &'static str,
    },

    /// No sign change over the bracket handed to a root finder.
    #[error("root bracket [{lo}, {hi}] does not straddle a sign change")]
    NoBracket {
        /// Lower bracket edge (rendered in `f64`).
        lo: f64,
        /// Upper bracket edge (rendered in `f64`).
        hi: f64,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            detail: detail.into(),
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Failures raised by the numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no convergence in {context}: {detail}")]
    NonConvergence {
        context: &'static str,
        detail: String,
    },

    /// Two independent evaluation routes disagreed beyond tolerance.
    #[error("cross-check failed in {context}: {lhs} vs {rhs} (tolerance {tolerance})")]
    CrossCheckFailure {
        context: &'static str,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
    },

    /// A quantity that is provably positive came out non-positive.
    #[error("degenerate slope in {context}: {value}")]
    DegenerateSlope { context: &'static str, value: f64 },

    #[error("domain violation: {0}")]
    DomainViolation(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn no_convergence(context: &'static str, detail: impl Into<String>) -> Self {
        Error::NonConvergence {
            context,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Failure modes shared by every evaluator in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series tail or quadrature error estimate exceeded the requested tolerance.
    #[error("accuracy error: {what} (estimate {estimate:e} > tolerance {tolerance:e})")]
    Accuracy {
        what: String,
        estimate: f64,
        tolerance: f64,
    },

    /// The requested combination is not implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Curvature constants were used under the wrong normalization convention.
    #[error("convention error: expected {expected}, got {got}")]
    Convention { expected: String, got: String },

    /// No constant satisfies the requested bound. The message names a witness point.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// The phase-space solver detected instability or lost monotonicity.
    #[error("solver error: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn accuracy(what: impl Into<String>, estimate: f64, tolerance: f64) -> Self {
        Error::Accuracy {
            what: what.into(),
            estimate,
            tolerance,
        }
    }
}

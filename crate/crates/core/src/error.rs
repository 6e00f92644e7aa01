use thiserror::Error;

/// Errors raised by the library. Classification results (incoherent or
/// not, equivalent or not) are values, never errors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("uncertainty relation violated: symplectic eigenvalue {value} < 1")]
    UncertaintyViolation { value: f64 },
    #[error("channel is not completely positive (min eigenvalue {min_eigenvalue:e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },
    #[error("reference output is not faithful: mode {mode} has occupation {occupation:e}")]
    NotFaithful { mode: usize, occupation: f64 },
    #[error("hypothesis violated at mode {mode}: {reason}")]
    HypothesisViolated { mode: usize, reason: String },
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("malformed document: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Shape(_) => "shape-error",
            Error::NotSymmetric { .. } => "not-symmetric",
            Error::UncertaintyViolation { .. } => "uncertainty-violation",
            Error::NotCompletelyPositive { .. } => "not-completely-positive",
            Error::NotFaithful { .. } => "not-faithful",
            Error::HypothesisViolated { .. } => "hypothesis-violated",
            Error::InvariantViolation(_) => "invariant-violation",
            Error::Numeric(_) => "numeric-error",
            Error::Unsupported(_) => "unsupported",
            Error::Parse(_) => "parse-error",
        }
    }

    /// True for errors caused by numerics rather than by the input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Numeric(_) | Error::InvariantViolation(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

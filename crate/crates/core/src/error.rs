use thiserror::Error;

/// Errors raised across the crate.
///
/// Configuration and precondition failures are kept separate from numerical
/// failures so that front ends can map them onto distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QemError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unknown gate `{0}`")]
    UnknownGate(String),

    #[error("channel is not trace preserving (completeness residual {0:.3e})")]
    NotTracePreserving(f64),

    #[error("observable norm {0} exceeds 1")]
    ObservableNorm(f64),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("integration failed in segment {segment}: trace drift {drift:.3e}")]
    Integration { segment: usize, drift: f64 },

    #[error("ill-conditioned system: {0}")]
    IllConditioned(String),

    #[error("circuit shape unsupported: {0}")]
    CircuitShape(String),

    #[error("enumeration too large: {0} branches")]
    TooLarge(u128),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl QemError {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            QemError::Integration { .. } | QemError::IllConditioned(_) | QemError::NotTracePreserving(_)
        )
    }
}

impl From<std::io::Error> for QemError {
    fn from(e: std::io::Error) -> Self {
        QemError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, QemError>;

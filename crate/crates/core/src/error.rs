use thiserror::Error;

/// Errors raised by channel construction, validation and the decision procedures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid correlation: {0}")]
    InvalidCorrelation(String),

    #[error("channel is not commutativity preserving (commutator norm {norm:.3e})")]
    NotCommutativityPreserving { norm: f64 },

    #[error("qubit channel is not D2-covariant (displacement off the ellipsoid axes: {residual:.3e})")]
    NotD2Covariant { residual: f64 },

    #[error("ordering convention violated: {0}")]
    ConventionViolation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("enumeration of {count} deterministic maps exceeds the limit of {limit}")]
    EnumerationGuard { count: u128, limit: u128 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Reasons a channel fails to decompose as an incoherent channel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Refusal {
    #[error("displacement is nonzero (max |dbar| = {max_abs:e})")]
    DisplacementNonZero { max_abs: f64 },
    #[error("noise block ({row}, {col}) is not a multiple of the identity (deviation {deviation:e})")]
    NoiseNotScalar { row: usize, col: usize, deviation: f64 },
    #[error("gain block row {row} has {count} nonzero blocks, expected at most one")]
    RowSupport { row: usize, count: usize },
    #[error("gain block column {col} has {count} nonzero blocks, expected at most one")]
    ColumnSupport { col: usize, count: usize },
    #[error("gain block ({row}, {col}) is not a scalar times an orthogonal matrix (residual {residual:e})")]
    NotScaledOrthogonal { row: usize, col: usize, residual: f64 },
    #[error("noise {lambda} on input mode {mode} is below the bound {bound}")]
    BelowBound { mode: usize, lambda: f64, bound: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("not an incoherent channel: {0}")]
    NotIncoherent(Refusal),
    /// Input document does not match the expected JSON layout.
    #[error("schema violation: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn mismatch(msg: impl Into<String>) -> Error {
    Error::DimensionMismatch(msg.into())
}

pub(crate) fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("size mismatch: expected {expected} values, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("fields live on different lattices")]
    LatticeMismatch,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("mass must be positive, got {0}")]
    NonPositiveMass(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("time samples are not uniform")]
    NonUniformTimes,

    #[error("sampling too coarse: {0}")]
    UnderResolved(String),

    #[error("numerical abort at t = {time}: {reason}")]
    NumericalAbort { time: f64, reason: String },

    #[error("invalid system definition: {0}")]
    InvalidSystem(String),

    #[error("exponent out of range: {0}")]
    ExponentRange(String),
}

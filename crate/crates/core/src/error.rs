use thiserror::Error;

/// Errors raised by the entropy, moment and criterion routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("covariance is not symmetric: entry ({row}, {col}) differs from its transpose by {diff:e}")]
    NotSymmetric { row: usize, col: usize, diff: f64 },

    #[error("covariance is not positive definite: leading minor of order {order} is {value:e}")]
    NotPositiveDefinite { order: usize, value: f64 },

    #[error("covariance is numerically singular: smallest/largest eigenvalue ratio {ratio:e} < 1e-10")]
    NearSingular { ratio: f64 },

    #[error("conditioning block is singular")]
    SingularGivenBlock,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported dimension {0} (supported: 1..=6)")]
    UnsupportedDimension(usize),

    #[error("invalid conditioning spec: {0}")]
    InvalidCondition(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("moment order {order} exceeds the cap of {cap}")]
    OrderCapExceeded { order: usize, cap: usize },

    #[error("perfect matchings need an even number of symbols, got {0}")]
    OddOrder(usize),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid too coarse: refining moved the result from {coarse} to {fine} (tolerance {tol:e})")]
    GridTooCoarse { coarse: f64, fine: f64, tol: f64 },

    #[error("reference density vanishes where the weighted density does not (at {at:?})")]
    SupportMismatch { at: Vec<f64> },

    #[error("invalid probability table: {0}")]
    InvalidPmf(String),

    #[error("invalid dataset: {0}")]
    InvalidData(String),

    #[error("observation {index} has zero density under the model but positive weight")]
    OutOfSupport { index: usize },

    #[error("parameter vector {theta:?} lies outside the model bounds")]
    OutOfBounds { theta: Vec<f64> },

    #[error("no posterior draws supplied")]
    EmptyDraws,

    #[error("sampler acceptance rate {rate:e} is below 0.1%")]
    ZeroAcceptance { rate: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

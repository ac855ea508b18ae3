use thiserror::Error;

use crate::measure::ValidationReport;

pub type Result<T, E = LevyError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LevyError {
    #[error("invalid triplet: {0}")]
    InvalidTriplet(ValidationReport),

    #[error("non-integrable: {0}")]
    NonIntegrable(String),

    #[error("quadrature failed to reach tolerance: estimate {value:e}, error {error:e}")]
    Quadrature { value: f64, error: f64 },

    #[error("infinite jump activity on region {0}; use shell series")]
    InfiniteActivity(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("regions overlap: {0} and {1}")]
    OverlappingRegions(String, String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("time {time} is outside the path horizon [0, {horizon}]")]
    TimeOutOfRange { time: f64, horizon: f64 },

    #[error("time {0} is neither a grid time nor a jump time of the path")]
    NotObserved(f64),

    #[error("empty sample")]
    EmptySample,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid characteristic exponent: {0}")]
    InvalidExponent(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl LevyError {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        LevyError::InvalidArgument(msg.into())
    }
}

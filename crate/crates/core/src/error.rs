use thiserror::Error;

/// Errors returned by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// The requested evaluation route does not apply to this strategy, e.g.
    /// the integral formula on a cutoff vector that is not nonincreasing.
    #[error("unsupported strategy: {0}")]
    UnsupportedStrategy(String),
    #[error("unsupported comparison: {0}")]
    UnsupportedComparison(String),
    #[error("construction failed at {stage}: {reason}")]
    ConstructionFailed { stage: String, reason: String },
    #[error("degenerate state: {0}")]
    DegenerateState(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

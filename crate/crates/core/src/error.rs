use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: u32, found: u32 },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("no factor with index {0}")]
    MissingFactor(usize),
    #[error("set is not closed under the group action")]
    NotClosed,
    #[error("search space of 2^{0} elements exceeds the enumeration limit")]
    TooLarge(u32),
    #[error("degree out of the computed range")]
    OutOfRange,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

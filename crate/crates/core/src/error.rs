use thiserror::Error;

use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty permutation")]
    Empty,
    #[error("duplicate value {0}")]
    DuplicateValue(usize),
    #[error("value {value} out of range 1..={order}")]
    ValueOutOfRange { value: usize, order: usize },
    #[error("invalid token {0:?}")]
    InvalidToken(String),
    #[error("pattern of order {pattern} does not fit into permutation of order {perm}")]
    PatternTooLong { pattern: usize, perm: usize },
    #[error("orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("point configuration: {0}")]
    InvalidConfiguration(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("x = {0} lies on a piece boundary")]
    Boundary(Rational),
    #[error("x = {0} outside [0,1]")]
    OutOfUnitInterval(Rational),
    #[error("invalid rational {0:?}")]
    InvalidRational(String),
    #[error("invalid base-4 digit {0:?}")]
    InvalidDigit(char),
    #[error("fiber is not a probability measure: {0}")]
    NotProbability(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("sampler gave up after {0} retries")]
    RetriesExhausted(usize),
    #[error("model is not certified to avoid {0}")]
    NotCertified(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

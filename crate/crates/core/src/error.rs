use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("characteristic {0} is even; only odd characteristic is supported")]
    EvenCharacteristic(u64),
    #[error("extension degree must be at least 1, got {0}")]
    BadDegree(u32),
    #[error("field of order {p}^{ell} exceeds the 2^20 element limit")]
    FieldTooLarge { p: u64, ell: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("parameter must be nonzero")]
    ZeroParameter,
    #[error("exponent {0} must be even")]
    OddExponent(u32),
    #[error("dimension {got} is too small (need at least {min})")]
    DimensionTooSmall { got: usize, min: usize },
    #[error("enumeration of {size} elements exceeds the cap of {cap}")]
    EnumerationTooLarge { size: u128, cap: u128 },
    #[error("point set is empty")]
    EmptySet,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("operation requires {expected} dimension, got d = {d}")]
    WrongParity { d: usize, expected: &'static str },
    #[error("{pairs} pairs exceeds the cap of {cap}")]
    TooManyPairs { pairs: u128, cap: u128 },
    #[error("dimension d = {0} is not covered by the spectral identities")]
    UnsupportedDimension(usize),
    #[error("no theorem clause covers d = {0}")]
    UnsupportedCase(usize),
    #[error("requested {size} points but the space only has {available}")]
    SizeTooLarge { size: u64, available: u64 },
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("invalid element index {0}")]
    InvalidElement(u64),
    #[error("{0} did not clear to an integer")]
    NonIntegral(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("field mismatch between point sets or files")]
    FieldMismatch,
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dilation must be prime, got {0}")]
    CompositeDilation(i64),

    #[error("the centered convention needs an odd prime, got p = {0}")]
    InvalidConvention(i64),

    #[error("{value} has no inverse modulo {p}")]
    ZeroResidue { value: i64, p: i64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("filter is not lowpass: taps sum to {sum}, expected {expected}")]
    NotLowpass { sum: String, expected: String },

    #[error("{name} is not interpolatory: {detail}")]
    NotInterpolatory { name: String, detail: String },

    #[error("cyclotomic operands live in different fields: p = {0} and p = {1}")]
    FieldMismatch(u32, u32),

    #[error("axis {axis} has length {len}, which is not divisible by {divisor}")]
    ShapeNotDivisible { axis: usize, len: usize, divisor: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("the fast transform needs a prime coset sum bank with 1-D generators")]
    WrongProvenance,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

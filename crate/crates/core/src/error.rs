use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("incompatible exponent denominators {0} and {1}")]
    DenomMismatch(u32, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("negative argument {0}")]
    NegativeArgument(i64),
    #[error("unsupported Cartan type {0}")]
    UnsupportedType(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("word {0} is not reduced")]
    NotReduced(String),
    #[error("word {0} is not a reduced word of the longest element")]
    NotReducedForW0(String),
    #[error("weight height {height} exceeds cap {cap}")]
    HeightCapExceeded { height: i64, cap: i64 },
    #[error("convention check failed: {0}")]
    Convention(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

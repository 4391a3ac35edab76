use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("factorization of {0} is incomplete")]
    IncompleteFactorization(String),
    #[error("factorization budget exceeded for {0}")]
    BudgetExceeded(String),
    #[error("value out of supported range: {0}")]
    RangeExceeded(String),
    #[error("{0} is not a prime")]
    NotPrime(String),
    #[error("{0} is not a prime power")]
    NotPrimePower(String),
    #[error("arguments are not coprime: {0}")]
    NotCoprime(String),
    #[error("zero element has no {0}")]
    ZeroElement(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition failed: {0}")]
    PrecheckFailed(String),
    #[error("numerical residue {residue:.3e} exceeds tolerance in {context}")]
    NumericalInstability { residue: f64, context: String },
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid factor hint: {0}")]
    InvalidHint(String),
    #[error("cross-check failed: {0}")]
    CrossCheckFailed(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("empty data")]
    EmptyData,

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("fit did not converge: {0}")]
    NonConvergent(String),

    #[error("observed information is not positive definite")]
    InformationNotPositiveDefinite,

    #[error("{0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

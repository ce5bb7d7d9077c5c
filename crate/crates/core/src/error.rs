use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("argument outside the operator domain: {0}")]
    InvalidDomain(String),
    #[error("unsupported function space: {0}")]
    UnsupportedSpace(String),
    #[error("site counts differ: {left} vs {right}")]
    SiteMismatch { left: usize, right: usize },
    #[error("quadrature did not converge: value {value}, error estimate {error_estimate} after {evaluations} evaluations")]
    Quadrature {
        value: f64,
        error_estimate: f64,
        evaluations: usize,
    },
    #[error("eigensolver did not converge after {sweeps} sweeps")]
    Eigen { sweeps: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

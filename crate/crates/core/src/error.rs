use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid cardinality tuple: {0}")]
    InvalidCardinality(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("scenario mismatch: {0}")]
    ScenarioMismatch(String),
    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cone is not full-dimensional: rank {rank} in dimension {dim}")]
    NotFullDimensional { rank: usize, dim: usize },
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("no behavior saturates the inequality")]
    NoSaturation,
    #[error("empty vertex set")]
    EmptyModel,
    #[error("invalid extension rule: {0}")]
    InvalidRule(String),
    #[error("seesaw did not converge after {sweeps} sweeps (last value {last})")]
    NoConvergence { sweeps: usize, last: f64 },
    #[error("quantum configuration check failed: {0}")]
    QuantumCheck(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

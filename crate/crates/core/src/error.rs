use thiserror::Error;

/// Errors raised by the numerical kernels, the function catalog and the engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument outside the supported domain: {0}")]
    Domain(String),
    #[error("no sign change found after {expansions} bracket expansions")]
    NoSignChange { expansions: usize },
    #[error("function returned a non-finite value at {at}")]
    NonFinite { at: f64 },
    #[error("empty input vector")]
    EmptyInput,
    #[error("root finding did not converge within {max_iter} iterations")]
    SolverFailure { max_iter: usize },
    #[error("nested perspective depth {depth} exceeds the configured maximum {max}")]
    NestingTooDeep { depth: usize, max: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

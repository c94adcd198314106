use thiserror::Error;

/// Errors produced by the rsbm library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates one of the model's standing invariants.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("empty range: {0}")]
    EmptyRange(&'static str),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid labeling: {0}")]
    InvalidLabeling(String),

    /// The rejection (or restart) budget of a sampler was exhausted.
    #[error("sampling failed after {attempts} attempts: {what}")]
    SamplingFailure { what: String, attempts: usize },

    /// Power iteration did not reach the requested residual.
    #[error(
        "eigensolver did not converge after {iterations} iterations \
         (best residual {best_residual:.3e}, estimate {best_estimate})"
    )]
    Convergence {
        iterations: usize,
        best_residual: f64,
        best_estimate: f64,
    },

    /// A computation would exceed its configured work budget.
    #[error("resource budget exceeded: {what} (estimated {estimated}, limit {limit})")]
    Budget {
        what: String,
        estimated: u128,
        limit: u128,
    },

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

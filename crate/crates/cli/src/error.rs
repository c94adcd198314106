use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the command-line driver.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] rsbm::Error),

    #[error("{}: {source}", path.display())]
    File { path: PathBuf, source: rsbm::Error },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("invalid config {}: {message}", path.display())]
    Config { path: PathBuf, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Exit status for successful runs.
pub const EXIT_OK: u8 = 0;
/// Exit status for runtime and convergence failures.
pub const EXIT_RUNTIME: u8 = 1;
/// Exit status for validation and parse failures.
pub const EXIT_INVALID: u8 = 2;

fn core_is_invalid_input(e: &rsbm::Error) -> bool {
    use rsbm::Error::*;
    matches!(
        e,
        InvalidParams(_)
            | EmptyRange(_)
            | LengthMismatch { .. }
            | InvalidGraph(_)
            | InvalidLabeling(_)
            | Budget { .. }
            | Parse { .. }
    )
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) | CliError::File { source: e, .. } if core_is_invalid_input(e) => {
                EXIT_INVALID
            }
            CliError::Validation(_) | CliError::Config { .. } => EXIT_INVALID,
            _ => EXIT_RUNTIME,
        }
    }

    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        use rsbm::Error::*;
        let core = match self {
            CliError::Core(e) | CliError::File { source: e, .. } => e,
            CliError::Validation(_) => return "validation",
            CliError::Config { .. } => return "config",
            CliError::Io(_) => return "io",
            CliError::Json(_) => return "json",
            CliError::Csv(_) => return "csv",
        };
        match core {
            InvalidParams(_) => "invalid_params",
            EmptyRange(_) => "empty_range",
            LengthMismatch { .. } => "length_mismatch",
            InvalidGraph(_) => "invalid_graph",
            InvalidLabeling(_) => "invalid_labeling",
            SamplingFailure { .. } => "sampling_failure",
            Convergence { .. } => "convergence",
            Budget { .. } => "budget",
            Overflow(_) => "overflow",
            Parse { .. } => "parse",
            Io(_) => "io",
        }
    }
}

pub(crate) trait WithPath<T> {
    fn at(self, path: &std::path::Path) -> Result<T>;
}

impl<T> WithPath<T> for rsbm::Result<T> {
    fn at(self, path: &std::path::Path) -> Result<T> {
        self.map_err(|source| CliError::File {
            path: path.to_path_buf(),
            source,
        })
    }
}

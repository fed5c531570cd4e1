use thiserror::Error;

use dirac_stability::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 domain/config, 3 non-convergence, 4 validation, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(CoreError::Domain { .. } | CoreError::Argument(_)) => 2,
            CliError::Core(_) => 3,
            CliError::Config(_) => 2,
            CliError::Validation(_) => 4,
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 1,
        }
    }

    /// Downstream reader went away (e.g. `| head`).
    pub fn is_broken_pipe(&self) -> bool {
        let kind = match self {
            CliError::Io(e) => Some(e.kind()),
            CliError::Csv(e) => match e.kind() {
                csv::ErrorKind::Io(e) => Some(e.kind()),
                _ => None,
            },
            CliError::Json(e) => e.io_error_kind(),
            _ => None,
        };
        kind == Some(std::io::ErrorKind::BrokenPipe)
    }
}

pub type CliResult<T> = Result<T, CliError>;

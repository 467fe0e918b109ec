use std::path::PathBuf;
use std::process::ExitCode;

use pacsafe::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// Process exit status: 1 validation failure, 2 configuration error,
    /// 4 plugin failure, 5 solver failure. 0 and 3 (accept and reject) are
    /// not errors.
    pub fn exit_code(&self) -> ExitCode {
        let code = match self {
            CliError::Validation(_) => 1,
            CliError::Core(CoreError::Plugin(_)) => 4,
            CliError::Core(CoreError::Solver(_)) => 5,
            CliError::Core(CoreError::Certificate(_)) => 1,
            CliError::Config(_) | CliError::Read { .. } | CliError::Write { .. } | CliError::Core(_) => 2,
        };
        ExitCode::from(code)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

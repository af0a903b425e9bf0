use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Numerical(#[from] fh_levy::Error),

    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Numerical(_) => 2,
            CliError::Validation(_) => 3,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// Library errors raised while reading a config describe bad input, not
    /// a numerical breakdown.
    pub(crate) fn invalid(context: &str, err: fh_levy::Error) -> Self {
        CliError::Config(format!("{context}: {err}"))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

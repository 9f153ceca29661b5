//! CLI error type with process exit-code mapping.

use std::path::Path;

/// Everything that can go wrong driving an experiment, tagged by exit code:
/// configuration problems exit 2, numerical failures 3, I/O failures 4.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("I/O failure: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    /// Wraps an I/O error with the path it happened on.
    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

impl From<scatter::Error> for CliError {
    fn from(err: scatter::Error) -> Self {
        match err {
            scatter::Error::Config(msg) => CliError::Config(msg),
            scatter::Error::Domain(msg) | scatter::Error::Numerical(msg) => {
                CliError::Numerical(msg)
            }
        }
    }
}

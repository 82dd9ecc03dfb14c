//! CLI error type and its mapping onto process exit codes.
//!
//! Exit codes: 0 success, 2 configuration or validation error, 3 numerical
//! error (singular configuration), 4 I/O error. Argument-parsing errors also
//! exit with 2, which is clap's own convention for usage errors.

use std::fmt;

use relbell::Error as RelbellError;

#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration or parameters (exit code 2).
    Config(String),
    /// Numerically singular configuration (exit code 3).
    Numerical(String),
    /// Filesystem failure, with the offending path (exit code 4).
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Numerical(msg) => write!(f, "{msg}"),
            CliError::Io { path, source } => write!(f, "{path}: {source}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Physics-library errors become validation errors, except the singular
/// linear solve, which is the one genuinely numerical failure mode.
impl From<RelbellError> for CliError {
    fn from(err: RelbellError) -> Self {
        match err {
            RelbellError::DegenerateConfiguration { .. } => CliError::Numerical(err.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

//! CLI error type carrying the process exit code.

use std::fmt;

/// Exit code 2: bad input, configuration or I/O.
/// Exit code 3: the data rejected the estimator (feasibility).
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Estimation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Estimation(_) => 3,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::Estimation(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<gsb::Error> for CliError {
    fn from(err: gsb::Error) -> Self {
        match err {
            gsb::Error::Infeasible { .. } => CliError::Estimation(err.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

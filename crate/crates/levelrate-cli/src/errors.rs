//! Runner errors and their process exit codes.

use thiserror::Error;

/// Process exit codes: 0 success, 1 check failure, 2 config error,
/// 3 runtime error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    /// A run diverged or a verification check failed; artifacts are on disk.
    CheckFailed = 1,
    ConfigError = 2,
    RuntimeError = 3,
}

impl ExitCode {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration or input data; maps to exit 2.
    #[error("{0}")]
    Config(String),
    /// I/O or unexpected runtime failure; maps to exit 3.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::ConfigError,
            CliError::Runtime(_) => ExitCode::RuntimeError,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("io error: {e}"))
    }
}

impl From<levelrate::Error> for CliError {
    fn from(e: levelrate::Error) -> Self {
        use levelrate::Error::*;
        match e {
            Numerical(_) | Sampling(_) => CliError::Runtime(e.to_string()),
            Dimension(_) | Parameter(_) | Input(_) | Data(_) | Config(_) => {
                CliError::Config(e.to_string())
            }
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(format!("json error: {e}"))
    }
}

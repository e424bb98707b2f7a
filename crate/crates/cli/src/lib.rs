//! Experiment runner around `strongmax-core`: instance generators, parameter
//! sweeps with CSV output, oracle differencing and the file-based commands
//! behind the `strongmax` binary.

pub mod commands;
pub mod config;
pub mod generators;
pub mod oracle;
pub mod sweep;

pub use config::ExperimentConfig;
pub use generators::{generate, Generator, WEIGHT_FLOOR};
pub use oracle::{run_oracle_diff, OracleDiffReport, ORACLE_TOLERANCE};
pub use sweep::{run_sweep, SweepOutput};

/// Failures of a command, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input, unknown names or instances beyond a resource bound.
    #[error("{0}")]
    Input(String),
    /// An invariant or acceptance check failed.
    #[error("{0}")]
    Violation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Violation(_) => 1,
        }
    }
}

impl From<strongmax_core::Error> for CliError {
    fn from(e: strongmax_core::Error) -> Self {
        match e {
            strongmax_core::Error::Invariant(_) => CliError::Violation(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

//! Command-line companion to `tomd-core`: dataset ingestion, synthetic data,
//! benchmark presets, report serialization, and the subcommand drivers.

pub mod commands;
pub mod io;
pub mod manifest;
pub mod presets;
pub mod report;
pub mod synthetic;

pub use commands::{run_cluster, run_reconstruction_bench};

/// CLI-level error. Validation problems (bad files, bad arguments, shape
/// mismatches) exit with code 2; numerical failures exit with code 3.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<tomd_core::Error> for CliError {
    fn from(e: tomd_core::Error) -> Self {
        match e {
            tomd_core::Error::Numerical(m) => CliError::Numerical(m),
            other => CliError::Validation(other.to_string()),
        }
    }
}

//! Command-line experiment runner for the two-level and two-grid methods:
//! run configuration, table generation and output formatting.

pub mod config;
pub mod experiment;
pub mod problem_file;
pub mod table;

pub use config::{Algorithm, Example, FineFactor, OutputFormat, RunConfig};
pub use experiment::{compute_row, dof_table, run_experiment, DofRow, DofTable, RowResult};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] twolevel_core::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

pub type CliResult<T> = Result<T, CliError>;

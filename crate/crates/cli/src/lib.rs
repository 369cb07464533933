//! Command-line driver: reads a run configuration, solves the coupled
//! problem and writes the resulting artifacts to an output directory.

pub mod commands;
pub mod config;

pub use commands::{run_convergence, run_oracle, run_solve, run_validate, OracleArgs, OracleKind, SolveOverrides, Summary};
pub use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Solver(_) | Self::Output(_) => 3,
        }
    }
}

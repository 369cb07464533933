//! Reference solutions independent of the discretisation modules: modal
//! series for radially symmetric scatterers, brute-force quadrature and
//! convergence tables.

mod convergence;
mod quadrature;
mod series;

pub use convergence::{convergence_study, max_relative_error, ConvergenceRow, ConvergenceTable, RunOutcome, Truth};
pub use quadrature::{brute_log_quadrature, brute_quadrature, gauss_legendre, graded_quadrature};
pub use series::{mie_far_field, mie_near_field, Profile, SeriesKind, SeriesSolution, MAX_MODES};

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("invalid oracle parameter: {0}")]
    InvalidParameter(String),
    #[error("series did not converge: {0}")]
    NonConvergent(String),
    #[error("run failed: {0}")]
    Run(String),
}

//! Overlapping FEM–BEM coupling: the interface system on the Γ trace, its
//! Schur complement `I − K̃K̂`, and reconstruction of the global field.

mod gmres;
mod problem;
mod solve;

pub use gmres::{gmres, GmresOutcome};
pub use problem::CoupledProblem;
pub use solve::{
    overlap_consistency, reconstruct, solve_interface, Density, InterfaceState, OverlapReport, Reconstruction,
    SchurMatrix, SolveMethod, SolverDiagnostics, DEFAULT_TOL,
};

use crate::bem::BemError;
use crate::fem::FemError;
use crate::geometry::GeometryError;

#[derive(Debug, thiserror::Error)]
pub enum CouplingError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Bem(#[from] BemError),
    #[error("GMRES did not reach tolerance {tol:e} in {iterations} iterations (last residual {:e})", history.last().copied().unwrap_or(f64::NAN))]
    NonConvergent { iterations: usize, tol: f64, history: Vec<f64> },
    #[error("interface matrix is singular: {0}")]
    Singular(String),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("incident wavenumber {got} differs from the assembled {expected}")]
    WavenumberMismatch { expected: f64, got: f64 },
    #[error("the overlap region between Γ and Σ contains no admissible sample points")]
    EmptyOverlap,
}

//! Nyström discretisation of the combined-field equation `(½I + K_k − ikV_k)φ = g`
//! on a smooth closed curve Γ, with potential and far-field evaluation.

mod grid;
mod kernels;
mod potentials;
mod quadrature;
mod system;

pub use grid::NystromGrid;
pub use kernels::{split_kernels, SplitKernels};
pub use potentials::{
    directions_from_angles, eval_potentials, eval_single_layer, far_field, far_field_csv, potential_matrix,
    uniform_angles, write_far_field_csv,
};
pub use quadrature::{log_weight_base, log_weight_row, trapezoid};
pub use system::{nystrom_matrix, BemSystem};

use crate::geometry::{GeometryError, Point};

#[derive(Debug, thiserror::Error)]
pub enum BemError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("N must be positive, got {0}")]
    InvalidN(usize),
    #[error("wavenumber must be positive and finite, got {0}")]
    InvalidWavenumber(f64),
    #[error("Nyström matrix is singular: {0}")]
    Singular(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("evaluation point ({}, {}) is not exterior to Γ", .0[0], .0[1])]
    InsideGamma(Point),
    #[error("far-field direction ({}, {}) is not a unit vector", .0[0], .0[1])]
    NonUnitDirection(Point),
}

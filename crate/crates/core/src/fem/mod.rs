//! Lagrange finite elements for the interior Dirichlet problem
//! `Δu + k²n²u = 0` in Ω₂ with data on Σ.

mod basis;
mod factor;
mod quadrature;
mod solution;
mod sparse;
mod system;

pub use basis::{ElementGeometry, LagrangeBasis};
pub use factor::{LbltFactor, PIVOT_TOL};
pub use quadrature::{triangle_rule, QuadPoint};
pub use solution::{FemSolution, Raster, RasterGrid, SobolevError, TraceMap};
pub use sparse::Csr;
pub use system::{assemble, element_matrices, FemSystem};

use crate::geometry::{GeometryError, Point};

#[derive(Debug, thiserror::Error)]
pub enum FemError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("triangle {index} is degenerate (area {area:e})")]
    DegenerateTriangle { index: usize, area: f64 },
    #[error("wavenumber must be finite and non-negative, got {0}")]
    InvalidWavenumber(f64),
    #[error(
        "resonant configuration: the interior Dirichlet problem is numerically singular \
         (pivot {pivot:e} against scale {scale:e}); change Σ or k"
    )]
    Resonant { pivot: f64, scale: f64 },
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("system has not been factorized")]
    NotFactorized,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point ({}, {}) lies outside the mesh", .0[0], .0[1])]
    OutsideMesh(Point),
}

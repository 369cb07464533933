//! Curves, triangulations, refractive-index fields, incident waves and the
//! nesting checks tying them together.

mod curve;
mod incident;
mod mesh;
mod meshio;
mod nesting;
mod refractive;

use std::path::PathBuf;

pub use curve::{point_in_polygon, polygon_distance, segment_distance, CurveSample, SmoothCurve};
pub use incident::IncidentWave;
pub use mesh::{
    build_structured_mesh, lattice, AlignmentReport, Location, NodeRole, PointLocator, Rect, TriMesh,
};
pub use meshio::{load_mesh, save_mesh};
pub use nesting::{validate_nesting, NestingReport};
pub use refractive::{cutoff, cutoff_tilde, RefractiveField, Support, LEVEL_SET_TOL};

/// A point in the plane.
pub type Point = [f64; 2];

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("curve evaluation is not finite at t = {t}")]
    NonFiniteCurve { t: f64 },
    #[error("curve parameterisation is irregular (|x'| = 0) at t = {t}")]
    IrregularCurve { t: f64 },
    #[error("curve is not 2π-periodic at t = {t} (gap {gap:e})")]
    NonPeriodicCurve { t: f64, gap: f64 },
    #[error("curve is oriented clockwise")]
    ClockwiseCurve,
    #[error("unsupported element degree {0}; expected 1..=4")]
    InvalidDegree(usize),
    #[error("invalid rectangle: {0}")]
    InvalidRectangle(String),
    #[error("triangle {index} is inverted or clockwise (signed area {area:e})")]
    InvertedTriangle { index: usize, area: f64 },
    #[error("triangle {index} is degenerate (area {area:e})")]
    DegenerateTriangle { index: usize, area: f64 },
    #[error("mesh is not conforming: {detail} (triangles {triangles:?})")]
    NonConforming { detail: String, triangles: Vec<usize> },
    #[error("{} triangles straddle the polygonal heterogeneity boundary, first {:?}", .triangles.len(), .triangles.first())]
    Misaligned { triangles: Vec<usize> },
    #[error("parse error in {}:{line}: {message}", .path.display())]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("nesting violated: {reason} at ({}, {})", .point[0], .point[1])]
    Nesting { reason: String, point: Point },
    #[error("point ({}, {}) lies outside the mesh", .0[0], .0[1])]
    OutsideMesh(Point),
    #[error("invalid incident wave: {0}")]
    InvalidWave(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

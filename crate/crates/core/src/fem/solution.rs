use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::basis::{ElementGeometry, LagrangeBasis};
use super::quadrature::triangle_rule;
use super::FemError;
use crate::geometry::{Point, Rect, TriMesh};

/// Nodal coefficients of a degree-`d` finite element function.
#[derive(Clone, Debug)]
pub struct FemSolution {
    mesh: Arc<TriMesh>,
    values: Vec<Complex64>,
}

/// Sparse map from node values to point values of the Lagrange interpolant.
#[derive(Clone, Debug)]
pub struct TraceMap {
    rows: Vec<Vec<(usize, f64)>>,
}

impl TraceMap {
    /// Locates every point once and records the local basis weights.
    pub fn new(mesh: &TriMesh, points: &[Point]) -> Result<Self, FemError> {
        let basis = LagrangeBasis::new(mesh.degree());
        let rows = points
            .par_iter()
            .map(|&p| {
                let loc = mesh.locate(p).map_err(|_| FemError::OutsideMesh(p))?;
                let phi = basis.eval(loc.bary);
                Ok(mesh.element_nodes(loc.triangle).iter().copied().zip(phi).collect())
            })
            .collect::<Result<_, FemError>>()?;
        Ok(Self { rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn apply(&self, values: &[Complex64]) -> Vec<Complex64> {
        self.rows.iter().map(|r| r.iter().map(|&(g, w)| values[g] * w).sum()).collect()
    }
}

/// Regular raster over a rectangle, `nx × ny` cell-centred samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RasterGrid {
    pub rect: Rect,
    pub nx: usize,
    pub ny: usize,
}

impl RasterGrid {
    pub fn points(&self) -> Vec<Point> {
        let (dx, dy) = ((self.rect.x1 - self.rect.x0) / self.nx as f64, (self.rect.y1 - self.rect.y0) / self.ny as f64);
        (0..self.ny)
            .flat_map(|j| (0..self.nx).map(move |i| [self.rect.x0 + (i as f64 + 0.5) * dx, self.rect.y0 + (j as f64 + 0.5) * dy]))
            .collect()
    }
}

/// Field samples in row-major order (`y` outer); `None` outside the mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    pub grid: RasterGrid,
    pub values: Vec<Option<Complex64>>,
}

/// Errors of a discrete solution against an exact one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SobolevError {
    pub l2: f64,
    pub h1_semi: f64,
}

impl SobolevError {
    pub fn h1(&self) -> f64 {
        self.l2.hypot(self.h1_semi)
    }
}

impl FemSolution {
    pub fn new(mesh: Arc<TriMesh>, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), mesh.n_nodes());
        Self { mesh, values }
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(mesh: Arc<TriMesh>, f: impl Fn(Point) -> Complex64) -> Self {
        let values = mesh.nodes().iter().map(|&p| f(p)).collect();
        Self { mesh, values }
    }

    pub fn mesh(&self) -> &Arc<TriMesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn dirichlet_values(&self) -> Vec<Complex64> {
        self.mesh.dirichlet_nodes().iter().map(|&g| self.values[g]).collect()
    }

    pub fn eval(&self, p: Point) -> Result<Complex64, FemError> {
        let loc = self.mesh.locate(p).map_err(|_| FemError::OutsideMesh(p))?;
        Ok(self.eval_in(loc.triangle, loc.bary))
    }

    /// Evaluates inside a given triangle at barycentric coordinates.
    pub fn eval_in(&self, triangle: usize, bary: [f64; 3]) -> Complex64 {
        let phi = LagrangeBasis::new(self.mesh.degree()).eval(bary);
        self.mesh.element_nodes(triangle).iter().zip(phi).map(|(&g, w)| self.values[g] * w).sum()
    }

    /// Values of the interpolant at `points`, each of which must lie in Ω₂.
    pub fn trace_at_points(&self, points: &[Point]) -> Result<Vec<Complex64>, FemError> {
        Ok(TraceMap::new(&self.mesh, points)?.apply(&self.values))
    }

    pub fn eval_field_on_grid(&self, grid: &RasterGrid) -> Raster {
        let values = grid.points().par_iter().map(|&p| self.eval(p).ok()).collect();
        Raster { grid: *grid, values }
    }

    /// `L²` and `H¹`-seminorm errors against `exact` returning value and gradient.
    pub fn sobolev_error<F>(&self, exact: F) -> SobolevError
    where
        F: Fn(Point) -> (Complex64, [Complex64; 2]) + Sync,
    {
        let basis = LagrangeBasis::new(self.mesh.degree());
        let rule = triangle_rule(8);
        let (l2, semi) = (0..self.mesh.n_triangles())
            .into_par_iter()
            .map(|t| {
                let geo = ElementGeometry::new(self.mesh.triangle_vertices(t));
                let nodes = self.mesh.element_nodes(t);
                let (mut l2, mut semi) = (0.0, 0.0);
                for (bary, w) in &rule {
                    let phi = basis.eval(*bary);
                    let grads = basis.grad_bary(*bary);
                    let mut u = Complex64::new(0.0, 0.0);
                    let mut gu = [Complex64::new(0.0, 0.0); 2];
                    for ((&g, p), gb) in nodes.iter().zip(&phi).zip(grads) {
                        let c = self.values[g];
                        u += c * p;
                        let gp = geo.physical_gradient(gb);
                        gu[0] += c * gp[0];
                        gu[1] += c * gp[1];
                    }
                    let (ue, ge) = exact(geo.point(*bary));
                    l2 += w * geo.area * (u - ue).norm_sqr();
                    semi += w * geo.area * ((gu[0] - ge[0]).norm_sqr() + (gu[1] - ge[1]).norm_sqr());
                }
                (l2, semi)
            })
            .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
        SobolevError { l2: l2.sqrt(), h1_semi: semi.sqrt() }
    }
}

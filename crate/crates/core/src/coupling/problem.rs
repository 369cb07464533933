use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;

use super::CouplingError;
use crate::bem::{potential_matrix, BemSystem, NystromGrid};
use crate::fem::{assemble, FemSystem, TraceMap};
use crate::geometry::{validate_nesting, IncidentWave, NestingReport, NodeRole, Point, RefractiveField, SmoothCurve, TriMesh};

/// Interpolation weights of one Γ node, split by node role so that the
/// trace can be read from free values and Dirichlet data directly.
#[derive(Clone, Debug)]
struct GammaRow {
    free: Vec<(usize, f64)>,
    dirichlet: Vec<(usize, f64)>,
}

/// Assembled and factorized FEM and BEM parts together with the evaluation
/// maps `K̃ = T A⁻¹ D` (Σ data to Γ trace) and `K̂ = P B⁻¹` (Γ data to Σ values).
pub struct CoupledProblem {
    fem: FemSystem,
    bem: BemSystem,
    wave: IncidentWave,
    sigma_points: Vec<Point>,
    gamma_points: Vec<Point>,
    gamma_rows: Vec<GammaRow>,
    potential: Mat<Complex64>,
    k_hat: Mat<Complex64>,
    nesting: NestingReport,
}

impl CoupledProblem {
    /// Checks the nesting `Ω̄₀ ⊂ Ω₁ ⊂ Ω̄₁ ⊂ Ω₂`, assembles and factorizes the
    /// FEM system on `mesh` and the Nyström system on `curve` with `2n` nodes.
    pub fn assemble(
        mesh: Arc<TriMesh>,
        field: &RefractiveField,
        curve: SmoothCurve,
        n: usize,
        wave: IncidentWave,
    ) -> Result<Self, CouplingError> {
        let nesting = validate_nesting(&curve, &mesh, field)?;
        let k = wave.k;
        let fem = assemble(mesh.clone(), k, field)?.factorize()?;
        let grid = NystromGrid::new(curve, n)?;
        let gamma_points = grid.points();
        let bem = BemSystem::assemble(grid, k)?;
        let sigma_points = mesh.dirichlet_points();
        let potential = potential_matrix(bem.grid(), k, &sigma_points)?;
        let identity = Mat::<Complex64>::identity(gamma_points.len(), gamma_points.len());
        let b_inv = bem.solve_matrix(&identity)?;
        let k_hat = &potential * &b_inv;
        let trace = TraceMap::new(&mesh, &gamma_points)?;
        let gamma_rows = trace
            .rows()
            .iter()
            .map(|row| {
                let mut r = GammaRow { free: Vec::new(), dirichlet: Vec::new() };
                for &(g, w) in row {
                    match mesh.role(g) {
                        NodeRole::Free(i) => r.free.push((i, w)),
                        NodeRole::Dirichlet(j) => r.dirichlet.push((j, w)),
                    }
                }
                r
            })
            .collect();
        log::info!(
            "coupled problem: L = {}, M = {}, 2N = {}, cond(B) = {:.3e}",
            mesh.free_nodes().len(),
            sigma_points.len(),
            gamma_points.len(),
            bem.condition()
        );
        Ok(Self { fem, bem, wave, sigma_points, gamma_points, gamma_rows, potential, k_hat, nesting })
    }

    pub fn fem(&self) -> &FemSystem {
        &self.fem
    }

    pub fn bem(&self) -> &BemSystem {
        &self.bem
    }

    pub fn mesh(&self) -> &Arc<TriMesh> {
        self.fem.mesh()
    }

    pub fn wave(&self) -> &IncidentWave {
        &self.wave
    }

    pub fn k(&self) -> f64 {
        self.wave.k
    }

    pub fn nesting(&self) -> &NestingReport {
        &self.nesting
    }

    /// Σ-node coordinates, count M.
    pub fn sigma_points(&self) -> &[Point] {
        &self.sigma_points
    }

    /// Γ-node coordinates, count 2N.
    pub fn gamma_points(&self) -> &[Point] {
        &self.gamma_points
    }

    /// Number of Σ nodes M.
    pub fn m(&self) -> usize {
        self.sigma_points.len()
    }

    /// Number of Γ nodes 2N.
    pub fn two_n(&self) -> usize {
        self.gamma_points.len()
    }

    /// Potential matrix `P` (M × 2N).
    pub fn potential(&self) -> &Mat<Complex64> {
        &self.potential
    }

    /// `K̂ = P B⁻¹` (M × 2N).
    pub fn k_hat_matrix(&self) -> &Mat<Complex64> {
        &self.k_hat
    }

    fn check(&self, v: &[Complex64], expected: usize) -> Result<(), CouplingError> {
        if v.len() != expected {
            return Err(CouplingError::DimensionMismatch { expected, got: v.len() });
        }
        Ok(())
    }

    /// `K̂ g`: values at Σ nodes of the exterior field whose Γ trace is `g`.
    pub fn k_hat(&self, g: &[Complex64]) -> Result<Vec<Complex64>, CouplingError> {
        self.check(g, self.two_n())?;
        Ok((0..self.m()).map(|i| (0..g.len()).map(|j| self.k_hat[(i, j)] * g[j]).sum()).collect())
    }

    fn trace(&self, free: &[Complex64], f: &[Complex64]) -> Vec<Complex64> {
        self.gamma_rows
            .iter()
            .map(|r| {
                r.free.iter().map(|&(i, w)| free[i] * w).sum::<Complex64>()
                    + r.dirichlet.iter().map(|&(j, w)| f[j] * w).sum::<Complex64>()
            })
            .collect()
    }

    /// `K̃ f`: Γ trace of the interior FEM solution with Σ data `f`.
    pub fn k_tilde(&self, f: &[Complex64]) -> Result<Vec<Complex64>, CouplingError> {
        Ok(self.k_tilde_many(&[f.to_vec()])?.pop().unwrap())
    }

    /// `K̃` applied to several Σ data vectors; the FEM solves run in parallel.
    pub fn k_tilde_many(&self, data: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>, CouplingError> {
        for f in data {
            self.check(f, self.m())?;
        }
        let free = self.fem.solve_dirichlet_free(data)?;
        Ok(free.par_iter().zip(data).map(|(u, f)| self.trace(u, f)).collect())
    }

    /// `A_Sch f̃ = f̃ − K̃(K̂ f̃)`.
    pub fn apply_schur(&self, f_tilde: &[Complex64]) -> Result<Vec<Complex64>, CouplingError> {
        let f_hat = self.k_hat(f_tilde)?;
        let kk = self.k_tilde(&f_hat)?;
        Ok(f_tilde.iter().zip(kk).map(|(a, b)| a - b).collect())
    }

    /// Incident field sampled at the Σ and Γ nodes.
    pub fn incident_data(&self, wave: &IncidentWave) -> Result<(Vec<Complex64>, Vec<Complex64>), CouplingError> {
        if wave.k != self.k() {
            return Err(CouplingError::WavenumberMismatch { expected: self.k(), got: wave.k });
        }
        Ok((wave.eval_many(&self.sigma_points), wave.eval_many(&self.gamma_points)))
    }

    /// `−ũ^inc + K̃ û^inc` for the problem's own incident wave.
    pub fn interface_rhs(&self) -> Result<Vec<Complex64>, CouplingError> {
        Ok(self.interface_rhs_many(std::slice::from_ref(&self.wave))?.pop().unwrap())
    }

    /// Right-hand sides for several incident waves of the same wavenumber.
    pub fn interface_rhs_many(&self, waves: &[IncidentWave]) -> Result<Vec<Vec<Complex64>>, CouplingError> {
        let data = waves.iter().map(|w| self.incident_data(w)).collect::<Result<Vec<_>, _>>()?;
        let sigma: Vec<_> = data.iter().map(|(s, _)| s.clone()).collect();
        let kt = self.k_tilde_many(&sigma)?;
        Ok(kt.into_iter().zip(data).map(|(t, (_, g))| t.iter().zip(g).map(|(a, b)| a - b).collect()).collect())
    }
}

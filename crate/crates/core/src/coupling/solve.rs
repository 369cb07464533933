use std::fmt;
use std::time::Instant;

use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use super::gmres::gmres;
use super::{CouplingError, CoupledProblem};
use crate::bem::{eval_potentials, far_field};
use crate::fem::FemSolution;
use crate::geometry::{point_in_polygon, polygon_distance, IncidentWave, Point};

/// Default relative residual for GMRES.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Ratio of largest to smallest singular value above which `A_Sch` counts as singular.
const SINGULAR_RATIO: f64 = 1e14;
/// Points of Γ used for the overlap membership test.
const GAMMA_POLYGON: usize = 2048;

pub type Density = Vec<Complex64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMethod {
    Gmres,
    Direct,
}

impl fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Gmres => "gmres",
            Self::Direct => "direct",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SolverDiagnostics {
    pub method: SolveMethod,
    pub iterations: usize,
    /// Relative residuals, one per GMRES iteration (a single entry for the direct path).
    pub residual_history: Vec<f64>,
    /// `‖rhs − A_Sch f̃‖ / ‖rhs‖` recomputed after the solve.
    pub final_residual: f64,
    pub setup_seconds: f64,
    pub solve_seconds: f64,
}

impl SolverDiagnostics {
    /// One `iter, residual` line per recorded iteration.
    pub fn iteration_log(&self) -> String {
        self.residual_history.iter().enumerate().map(|(i, r)| format!("{i}, {r:.6e}\n")).collect()
    }
}

/// Interface unknowns: total field at Σ nodes and scattered trace at Γ nodes.
#[derive(Clone, Debug)]
pub struct InterfaceState {
    pub f_hat: Vec<Complex64>,
    pub f_tilde: Vec<Complex64>,
    pub diagnostics: SolverDiagnostics,
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn residual(problem: &CoupledProblem, rhs: &[Complex64], x: &[Complex64]) -> Result<f64, CouplingError> {
    let ax = problem.apply_schur(x)?;
    let r: Vec<_> = rhs.iter().zip(&ax).map(|(a, b)| a - b).collect();
    let b = norm(rhs);
    Ok(if b == 0.0 { norm(&r) } else { norm(&r) / b })
}

fn finish(problem: &CoupledProblem, wave: &IncidentWave, f_tilde: Vec<Complex64>) -> Result<Vec<Complex64>, CouplingError> {
    let (u_sigma, _) = problem.incident_data(wave)?;
    let kh = problem.k_hat(&f_tilde)?;
    Ok(u_sigma.iter().zip(kh).map(|(a, b)| a + b).collect())
}

/// Solves `A_Sch f̃ = −ũ^inc + K̃ û^inc` and sets `f̂ = û^inc + K̂ f̃`.
pub fn solve_interface(problem: &CoupledProblem, method: SolveMethod, tol: f64) -> Result<InterfaceState, CouplingError> {
    if !(tol > 0.0) {
        return Err(CouplingError::InvalidTolerance(tol));
    }
    match method {
        SolveMethod::Gmres => solve_gmres(problem, tol),
        SolveMethod::Direct => {
            let start = Instant::now();
            let schur = SchurMatrix::build(problem)?;
            let setup = start.elapsed().as_secs_f64();
            let mut state = schur.solve_waves(problem, std::slice::from_ref(problem.wave()))?.pop().unwrap();
            state.diagnostics.setup_seconds = setup;
            Ok(state)
        }
    }
}

fn solve_gmres(problem: &CoupledProblem, tol: f64) -> Result<InterfaceState, CouplingError> {
    let start = Instant::now();
    let rhs = problem.interface_rhs()?;
    let setup = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let max_iter = 10 * problem.two_n();
    let out = gmres(|x| problem.apply_schur(x), &rhs, tol, max_iter)?;
    for (i, r) in out.history.iter().enumerate() {
        log::debug!("gmres {i}, {r:.6e}");
    }
    if !out.converged {
        return Err(CouplingError::NonConvergent { iterations: out.iterations, tol, history: out.history });
    }
    let final_residual = if out.iterations == 0 { 0.0 } else { residual(problem, &rhs, &out.solution)? };
    let f_hat = finish(problem, problem.wave(), out.solution.clone())?;
    let diagnostics = SolverDiagnostics {
        method: SolveMethod::Gmres,
        iterations: out.iterations,
        residual_history: out.history,
        final_residual,
        setup_seconds: setup,
        solve_seconds: start.elapsed().as_secs_f64(),
    };
    Ok(InterfaceState { f_hat, f_tilde: out.solution, diagnostics })
}

/// Dense `A_Sch` with its LU factorization, reusable across incident waves
/// of the same wavenumber.
pub struct SchurMatrix {
    matrix: Mat<Complex64>,
    lu: PartialPivLu<Complex64>,
    condition: f64,
}

impl SchurMatrix {
    /// Builds `I − K̃K̂` column by column; the FEM solves for the 2N columns run in parallel.
    pub fn build(problem: &CoupledProblem) -> Result<Self, CouplingError> {
        let n2 = problem.two_n();
        let kh = problem.k_hat_matrix();
        let columns: Vec<Vec<Complex64>> = (0..n2).map(|j| (0..problem.m()).map(|i| kh[(i, j)]).collect()).collect();
        let kk = problem.k_tilde_many(&columns)?;
        let matrix = Mat::from_fn(n2, n2, |i, j| {
            let id = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            id - kk[j][i]
        });
        let sv = matrix.singular_values().map_err(|e| CouplingError::Singular(format!("{e:?}")))?;
        let smax = sv.iter().copied().fold(0.0, f64::max);
        let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
        let condition = smax / smin;
        if !(condition < SINGULAR_RATIO) {
            return Err(CouplingError::Singular(format!("condition number {condition:e}")));
        }
        let lu = matrix.partial_piv_lu();
        Ok(Self { matrix, lu, condition })
    }

    pub fn matrix(&self) -> &Mat<Complex64> {
        &self.matrix
    }

    /// 2-norm condition number of `A_Sch`.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.matrix.nrows();
        (0..n).map(|i| (0..n).map(|j| self.matrix[(i, j)] * x[j]).sum()).collect()
    }

    /// Eigenvalues of `A_Sch`.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>, CouplingError> {
        self.matrix.eigenvalues().map_err(|e| CouplingError::Singular(format!("{e:?}")))
    }

    /// Interface states for several incident waves, one multi-column LU solve.
    pub fn solve_waves(&self, problem: &CoupledProblem, waves: &[IncidentWave]) -> Result<Vec<InterfaceState>, CouplingError> {
        let start = Instant::now();
        let n2 = problem.two_n();
        if self.matrix.nrows() != n2 {
            return Err(CouplingError::DimensionMismatch { expected: self.matrix.nrows(), got: n2 });
        }
        let rhs = problem.interface_rhs_many(waves)?;
        let b = Mat::from_fn(n2, rhs.len(), |i, j| rhs[j][i]);
        let x = self.lu.solve(&b);
        let elapsed = start.elapsed().as_secs_f64();
        rhs.into_iter()
            .zip(waves)
            .enumerate()
            .map(|(c, (r, w))| {
                let f_tilde: Vec<_> = (0..n2).map(|i| x[(i, c)]).collect();
                let ax = self.apply(&f_tilde);
                let res = norm(&r.iter().zip(&ax).map(|(a, b)| a - b).collect::<Vec<_>>());
                let rel = if norm(&r) == 0.0 { res } else { res / norm(&r) };
                let f_hat = finish(problem, w, f_tilde.clone())?;
                Ok(InterfaceState {
                    f_hat,
                    f_tilde,
                    diagnostics: SolverDiagnostics {
                        method: SolveMethod::Direct,
                        iterations: 0,
                        residual_history: vec![rel],
                        final_residual: rel,
                        setup_seconds: 0.0,
                        solve_seconds: elapsed,
                    },
                })
            })
            .collect()
    }
}

/// Interior FEM field and exterior density of a solved interface state.
pub struct Reconstruction {
    pub interior: FemSolution,
    pub density: Density,
}

/// `u_h` from the FEM solve with data `f̂`, and `φ = B⁻¹ f̃`.
pub fn reconstruct(problem: &CoupledProblem, state: &InterfaceState) -> Result<Reconstruction, CouplingError> {
    let interior = problem.fem().solve_dirichlet(&state.f_hat)?;
    let density = problem.bem().solve_density(&state.f_tilde)?;
    Ok(Reconstruction { interior, density })
}

impl Reconstruction {
    /// Scattered field `ω_N` at points exterior to Γ.
    pub fn scattered(&self, problem: &CoupledProblem, points: &[Point]) -> Result<Vec<Complex64>, CouplingError> {
        Ok(eval_potentials(problem.bem().grid(), problem.k(), &self.density, points)?)
    }

    /// Far-field pattern at unit directions.
    pub fn far_field(&self, problem: &CoupledProblem, directions: &[Point]) -> Result<Vec<Complex64>, CouplingError> {
        Ok(far_field(problem.bem().grid(), problem.k(), &self.density, directions)?)
    }

    /// Global total field: `u_h` inside Γ, `ω_N + u^inc` outside.
    pub fn total_field(&self, problem: &CoupledProblem, p: Point) -> Result<Complex64, CouplingError> {
        let poly = problem.bem().grid().curve().polygon(GAMMA_POLYGON)?;
        if point_in_polygon(p, &poly) {
            Ok(self.interior.eval(p)?)
        } else {
            Ok(self.scattered(problem, &[p])?[0] + problem.wave().eval(p))
        }
    }
}

#[derive(Clone, Debug)]
pub struct OverlapReport {
    pub max_defect: f64,
    pub samples: usize,
    /// Points closer to Γ than this were rejected.
    pub exclusion: f64,
}

/// Largest `|u_h − (ω_N + u^inc)|` over `samples` random points of the overlap
/// `Ω₁ᶜ ∩ Ω₂`, skipping a band of three Γ grid spacings where the trapezoidal
/// potential loses accuracy.
pub fn overlap_consistency(
    problem: &CoupledProblem,
    recon: &Reconstruction,
    samples: usize,
    seed: u64,
) -> Result<OverlapReport, CouplingError> {
    let grid = problem.bem().grid();
    let exclusion = 3.0 * grid.spacing() * grid.max_speed();
    let poly = grid.curve().polygon(GAMMA_POLYGON)?;
    let mesh = problem.mesh();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for v in mesh.vertices() {
        for c in 0..2 {
            lo[c] = lo[c].min(v[c]);
            hi[c] = hi[c].max(v[c]);
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(samples);
    let max_draws = 1000 * samples.max(1);
    let mut draws = 0;
    while points.len() < samples {
        if draws == max_draws {
            return Err(CouplingError::EmptyOverlap);
        }
        draws += 1;
        let p = [rng.random_range(lo[0]..hi[0]), rng.random_range(lo[1]..hi[1])];
        if mesh.contains(p) && !point_in_polygon(p, &poly) && polygon_distance(p, &poly) > exclusion {
            points.push(p);
        }
    }
    let omega = recon.scattered(problem, &points)?;
    let max_defect = points
        .par_iter()
        .zip(&omega)
        .map(|(&p, &w)| -> Result<f64, CouplingError> { Ok((recon.interior.eval(p)? - w - problem.wave().eval(p)).norm()) })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(OverlapReport { max_defect, samples, exclusion })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_structured_mesh, Rect, RefractiveField, SmoothCurve};
    use crate::bem::directions_from_angles;
    use crate::bem::uniform_angles;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn problem(field: RefractiveField, k: f64, level: usize, amplitude: f64) -> CoupledProblem {
        let (mesh, _) = build_structured_mesh(Rect::new(-2.0, 2.0, -2.0, 2.0), [8, 8], level, 2, &field).unwrap();
        let wave = IncidentWave::with_amplitude(k, [0.6, 0.8], Complex64::new(amplitude, 0.0)).unwrap();
        CoupledProblem::assemble(Arc::new(mesh), &field, SmoothCurve::circle(1.4), 16, wave).unwrap()
    }

    fn disk() -> RefractiveField {
        RefractiveField::SmoothDisk { center: [0.0, 0.0], radius: 1.0, core_radius: 0.5, n0: 1.5 }
    }

    #[test]
    fn zero_wave_gives_zero_state() {
        let p = problem(disk(), 2.0, 0, 0.0);
        let s = solve_interface(&p, SolveMethod::Gmres, DEFAULT_TOL).unwrap();
        assert_eq!(s.diagnostics.iterations, 0);
        assert!(s.f_hat.iter().chain(&s.f_tilde).all(|z| z.norm() == 0.0));
        let r = reconstruct(&p, &s).unwrap();
        assert!(r.density.iter().all(|z| z.norm() == 0.0));
        assert!(r.interior.values().iter().all(|z| z.norm() == 0.0));
        assert_eq!(overlap_consistency(&p, &r, 20, 1).unwrap().max_defect, 0.0);
    }

    #[test]
    fn direct_and_gmres_agree() {
        let p = problem(disk(), 2.0, 1, 1.0);
        let g = solve_interface(&p, SolveMethod::Gmres, 1e-10).unwrap();
        let d = solve_interface(&p, SolveMethod::Direct, 1e-10).unwrap();
        let scale = d.f_tilde.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let diff = g.f_tilde.iter().zip(&d.f_tilde).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff <= 10.0 * 1e-10 * scale, "{diff}");
        assert!(g.diagnostics.final_residual <= 1e-9);
        assert!(d.diagnostics.final_residual <= 1e-12);
        assert!(g.diagnostics.iteration_log().lines().count() == g.diagnostics.iterations + 1);
    }

    #[test]
    fn dense_matrix_matches_operator() {
        let p = problem(disk(), 2.0, 0, 1.0);
        let s = SchurMatrix::build(&p).unwrap();
        let x: Vec<_> = (0..p.two_n()).map(|i| Complex64::new((i as f64).sin(), (0.3 * i as f64).cos())).collect();
        let (a, b) = (s.apply(&x), p.apply_schur(&x).unwrap());
        let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(a.iter().zip(&b).all(|(u, v)| (u - v).norm() <= 1e-10 * scale));
        // compact perturbation of the identity: no eigenvalue near zero
        assert!(s.eigenvalues().unwrap().iter().all(|z| z.norm() > 1e-6));
    }

    #[test]
    fn multiple_waves_match_individual_solves() {
        let p = problem(disk(), 2.0, 0, 1.0);
        let s = SchurMatrix::build(&p).unwrap();
        let waves = [IncidentWave::from_angle(2.0, 0.0).unwrap(), IncidentWave::from_angle(2.0, 2.0).unwrap()];
        let states = s.solve_waves(&p, &waves).unwrap();
        assert_eq!(states.len(), 2);
        let single = s.solve_waves(&p, &waves[1..]).unwrap().pop().unwrap();
        assert!(states[1].f_tilde.iter().zip(&single.f_tilde).all(|(a, b)| (a - b).norm() < 1e-13));
    }

    #[test]
    fn no_contrast_scatters_little_and_overlaps_consistently() {
        let dirs = directions_from_angles(&uniform_angles(64));
        let mut far = Vec::new();
        let mut defects = Vec::new();
        for level in 0..2 {
            let p = problem(RefractiveField::Uniform, PI / 2.0, level, 1.0);
            let s = solve_interface(&p, SolveMethod::Gmres, 1e-10).unwrap();
            let r = reconstruct(&p, &s).unwrap();
            far.push(r.far_field(&p, &dirs).unwrap().iter().map(|z| z.norm()).fold(0.0, f64::max));
            let a = overlap_consistency(&p, &r, 50, 7).unwrap();
            let b = overlap_consistency(&p, &r, 50, 8).unwrap();
            assert!(a.max_defect < 5e-2 && b.max_defect < 5e-2);
            defects.push(a.max_defect);
        }
        assert!(far[0] < 5e-2 && far[1] < far[0] / 4.0, "{far:?}");
        assert!(defects[1] < defects[0], "{defects:?}");
    }

    #[test]
    fn total_field_switches_representation() {
        let p = problem(disk(), 2.0, 0, 1.0);
        let s = solve_interface(&p, SolveMethod::Gmres, DEFAULT_TOL).unwrap();
        let r = reconstruct(&p, &s).unwrap();
        let inside = r.total_field(&p, [0.1, 0.2]).unwrap();
        assert_eq!(inside, r.interior.eval([0.1, 0.2]).unwrap());
        let outside = r.total_field(&p, [3.0, 0.0]).unwrap();
        assert_eq!(outside, r.scattered(&p, &[[3.0, 0.0]]).unwrap()[0] + p.wave().eval([3.0, 0.0]));
    }

    #[test]
    fn rejects_bad_tolerance() {
        let p = problem(disk(), 2.0, 0, 1.0);
        assert!(matches!(solve_interface(&p, SolveMethod::Gmres, 0.0), Err(CouplingError::InvalidTolerance(_))));
    }
}

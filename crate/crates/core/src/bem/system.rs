use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;

use super::kernels::split_kernels;
use super::quadrature::log_weight_base;
use super::{BemError, NystromGrid};

/// Ratio of extreme singular values beyond which `B` is declared singular.
const SINGULAR_RATIO: f64 = 1e14;

/// Dense Nyström matrix of `½I + K_k − ik V_k` with its LU factorization.
#[derive(Debug)]
pub struct BemSystem {
    grid: NystromGrid,
    k: f64,
    matrix: Mat<Complex64>,
    lu: PartialPivLu<Complex64>,
    condition: f64,
}

/// Nyström matrix entries, assembled in parallel over rows.
pub fn nystrom_matrix(grid: &NystromGrid, k: f64) -> Mat<Complex64> {
    let n2 = grid.len();
    let h = grid.spacing();
    let base = log_weight_base(grid.n());
    let ik = Complex64::new(0.0, k);
    let rows: Vec<Vec<Complex64>> = (0..n2)
        .into_par_iter()
        .map(|i| {
            let (s, xs) = (grid.params()[i], &grid.samples()[i]);
            (0..n2)
                .map(|j| {
                    let sk = split_kernels(k, s, grid.params()[j], xs, &grid.samples()[j]);
                    let w = base[(j + n2 - i) % n2];
                    let dl = sk.c * w + sk.d * h;
                    let sl = sk.a * w + sk.b * h;
                    let diag = if i == j { 0.5 } else { 0.0 };
                    dl - ik * sl + diag
                })
                .collect()
        })
        .collect();
    Mat::from_fn(n2, n2, |i, j| rows[i][j])
}

impl BemSystem {
    pub fn assemble(grid: NystromGrid, k: f64) -> Result<Self, BemError> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(BemError::InvalidWavenumber(k));
        }
        let matrix = nystrom_matrix(&grid, k);
        let sv = matrix.singular_values().map_err(|e| BemError::Singular(format!("{e:?}")))?;
        let smax = sv.iter().copied().fold(0.0, f64::max);
        let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
        let condition = smax / smin;
        if !(condition < SINGULAR_RATIO) {
            return Err(BemError::Singular(format!("condition number {condition:e}")));
        }
        let lu = matrix.partial_piv_lu();
        Ok(Self { grid, k, matrix, lu, condition })
    }

    pub fn grid(&self) -> &NystromGrid {
        &self.grid
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn matrix(&self) -> &Mat<Complex64> {
        &self.matrix
    }

    /// 2-norm condition number of `B`.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn apply(&self, phi: &[Complex64]) -> Result<Vec<Complex64>, BemError> {
        self.check(phi)?;
        let n = phi.len();
        Ok((0..n).map(|i| (0..n).map(|j| self.matrix[(i, j)] * phi[j]).sum()).collect())
    }

    fn check(&self, v: &[Complex64]) -> Result<(), BemError> {
        if v.len() != self.grid.len() {
            return Err(BemError::DimensionMismatch { expected: self.grid.len(), got: v.len() });
        }
        Ok(())
    }

    /// Solves `B φ = g`.
    pub fn solve_density(&self, g: &[Complex64]) -> Result<Vec<Complex64>, BemError> {
        self.check(g)?;
        let rhs = Mat::from_fn(g.len(), 1, |i, _| g[i]);
        let x = self.lu.solve(&rhs);
        Ok((0..g.len()).map(|i| x[(i, 0)]).collect())
    }

    /// Solves for several right-hand sides at once (columns of `g`).
    pub fn solve_matrix(&self, g: &Mat<Complex64>) -> Result<Mat<Complex64>, BemError> {
        if g.nrows() != self.grid.len() {
            return Err(BemError::DimensionMismatch { expected: self.grid.len(), got: g.nrows() });
        }
        Ok(self.lu.solve(g))
    }
}

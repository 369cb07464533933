use faer::dyn_stack::{MemBuffer, MemStack};
use faer::perm::PermRef;
use faer::sparse::linalg::cholesky::{
    factorize_symbolic_cholesky, CholeskySymbolicParams, IntranodeLbltRef, SymbolicCholesky,
    SymbolicCholeskyRaw, SymmetricOrdering,
};
use faer::sparse::linalg::SupernodalThreshold;
use faer::{Conj, MatMut, Par, Side};

use super::{Csr, FemError};

/// Relative pivot size below which the matrix is declared singular.
pub const PIVOT_TOL: f64 = 1e-12;

/// Sparse symmetric-indefinite `L B Lᵀ` factorization with 1×1 and 2×2
/// diagonal blocks and a fill-reducing ordering.
#[derive(Debug)]
pub struct LbltFactor {
    symbolic: SymbolicCholesky<usize>,
    values: Vec<f64>,
    subdiag: Vec<f64>,
    perm_fwd: Vec<usize>,
    perm_inv: Vec<usize>,
    min_pivot: f64,
}

fn block_min_eig(a: f64, s: f64, c: f64) -> f64 {
    let mean = 0.5 * (a + c);
    let rad = (0.5 * (a - c)).hypot(s);
    (mean - rad).abs().min((mean + rad).abs())
}

impl LbltFactor {
    /// Factorizes `a`, judging pivots against the largest diagonal entry of `a`.
    pub fn new(a: &Csr) -> Result<Self, FemError> {
        Self::with_scale(a, a.max_abs_diag())
    }

    /// Factorizes `a`, reporting a resonance when the smallest pivot falls
    /// below `PIVOT_TOL * scale`.
    pub fn with_scale(a: &Csr, scale: f64) -> Result<Self, FemError> {
        let n = a.nrows();
        if n == 0 {
            return Ok(Self {
                symbolic: factorize_symbolic_cholesky(
                    a.to_faer().symbolic(),
                    Side::Lower,
                    SymmetricOrdering::Identity,
                    Default::default(),
                )
                .map_err(|e| FemError::Factorization(format!("{e:?}")))?,
                values: Vec::new(),
                subdiag: Vec::new(),
                perm_fwd: Vec::new(),
                perm_inv: Vec::new(),
                min_pivot: f64::INFINITY,
            });
        }
        let mat = a.to_faer();
        let params = CholeskySymbolicParams {
            supernodal_flop_ratio_threshold: SupernodalThreshold::FORCE_SUPERNODAL,
            ..Default::default()
        };
        let symbolic = factorize_symbolic_cholesky(mat.symbolic(), Side::Lower, SymmetricOrdering::Amd, params)
            .map_err(|e| FemError::Factorization(format!("{e:?}")))?;
        let mut values = vec![0.0; symbolic.len_val()];
        let mut subdiag = vec![0.0; n];
        let mut perm_fwd = vec![0usize; n];
        let mut perm_inv = vec![0usize; n];
        let req = symbolic.factorize_numeric_intranode_lblt_scratch::<f64>(Par::Seq, Default::default());
        let mut buf = MemBuffer::new(req);
        symbolic.factorize_numeric_intranode_lblt(
            &mut values,
            &mut subdiag,
            &mut perm_fwd,
            &mut perm_inv,
            mat.as_ref(),
            Side::Lower,
            Par::Seq,
            MemStack::new(&mut buf),
            Default::default(),
        );

        let diag = match symbolic.raw() {
            SymbolicCholeskyRaw::Supernodal(sn) => {
                let mut d = vec![0.0; n];
                let begin = sn.supernode_begin();
                let end = sn.supernode_end();
                for s in 0..sn.n_supernodes() {
                    let (b, e) = (begin[s], end[s]);
                    let ncols = e - b;
                    let nrows = sn.supernode(s).pattern().len() + ncols;
                    let base = sn.col_ptr_for_val()[s];
                    for c in 0..ncols {
                        d[b + c] = values[base + c * nrows + c];
                    }
                }
                d
            }
            SymbolicCholeskyRaw::Simplicial(sim) => {
                let cp = sim.col_ptr();
                let ri = sim.row_idx();
                (0..n)
                    .map(|j| {
                        let r = cp[j]..cp[j + 1];
                        ri[r.clone()].iter().position(|&i| i == j).map_or(0.0, |p| values[r.start + p])
                    })
                    .collect()
            }
        };

        let scale = scale.max(f64::MIN_POSITIVE);
        let mut min_pivot = f64::INFINITY;
        let mut i = 0;
        while i < n {
            let m = if i + 1 < n && subdiag[i] != 0.0 {
                let m = block_min_eig(diag[i], subdiag[i], diag[i + 1]);
                i += 2;
                m
            } else {
                let m = diag[i].abs();
                i += 1;
                m
            };
            min_pivot = if m.is_finite() { min_pivot.min(m) } else { f64::NAN };
        }
        let valid = values.iter().all(|v| v.is_finite());
        if !valid || !(min_pivot >= PIVOT_TOL * scale) {
            return Err(FemError::Resonant { pivot: min_pivot, scale });
        }
        Ok(Self { symbolic, values, subdiag, perm_fwd, perm_inv, min_pivot: min_pivot / scale })
    }

    pub fn dim(&self) -> usize {
        self.perm_fwd.len()
    }

    /// Smallest pivot magnitude relative to the largest diagonal entry of the matrix.
    pub fn relative_min_pivot(&self) -> f64 {
        self.min_pivot
    }

    /// Overwrites each column of `rhs` with the solution.
    pub fn solve_in_place(&self, rhs: MatMut<'_, f64>) {
        let n = self.dim();
        if n == 0 {
            return;
        }
        let perm = PermRef::new_checked(&self.perm_fwd, &self.perm_inv, n);
        let f = IntranodeLbltRef::new(&self.symbolic, &self.values, &self.subdiag, perm);
        let req = self.symbolic.solve_in_place_scratch::<f64>(rhs.ncols(), Par::Seq);
        let mut buf = MemBuffer::new(req);
        f.solve_in_place_with_conj(Conj::No, rhs, Par::Seq, MemStack::new(&mut buf));
    }
}

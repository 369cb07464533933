use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;

use super::basis::{ElementGeometry, LagrangeBasis};
use super::quadrature::triangle_rule;
use super::{Csr, FemError, FemSolution, LbltFactor};
use crate::geometry::{NodeRole, RefractiveField, TriMesh};

/// Columns per block in multi right-hand-side solves.
const SOLVE_BLOCK: usize = 32;

/// Discrete interior Dirichlet problem `b_{k,n}(u, v) = ∫∇u·∇v − k²∫n²uv`
/// restricted to free nodes, with the coupling block to Dirichlet data on Σ.
#[derive(Debug)]
pub struct FemSystem {
    mesh: Arc<TriMesh>,
    k: f64,
    field: RefractiveField,
    stiffness: Csr,
    mass: Csr,
    a: Csr,
    d: Csr,
    factor: Option<LbltFactor>,
}

struct ElementBlocks {
    ff: Vec<(usize, usize, f64, f64)>,
    fd: Vec<(usize, usize, f64, f64)>,
}

/// Element stiffness and `n²`-weighted mass matrices, row-major.
pub fn element_matrices(
    geo: &ElementGeometry,
    basis: &LagrangeBasis,
    field: &RefractiveField,
) -> (Vec<f64>, Vec<f64>) {
    let nloc = basis.len();
    let rule = triangle_rule((2 * basis.degree() + 2).min(8));
    let mut kl = vec![0.0; nloc * nloc];
    let mut ml = vec![0.0; nloc * nloc];
    let mut phi = vec![0.0; nloc];
    for (bary, w) in &rule {
        basis.eval_into(*bary, &mut phi);
        let grads: Vec<[f64; 2]> = basis.grad_bary(*bary).into_iter().map(|g| geo.physical_gradient(g)).collect();
        let wa = w * geo.area;
        let wn = wa * field.n_squared(geo.point(*bary));
        for a in 0..nloc {
            for b in a..nloc {
                kl[a * nloc + b] += wa * (grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1]);
                ml[a * nloc + b] += wn * phi[a] * phi[b];
            }
        }
    }
    for a in 0..nloc {
        for b in 0..a {
            kl[a * nloc + b] = kl[b * nloc + a];
            ml[a * nloc + b] = ml[b * nloc + a];
        }
    }
    (kl, ml)
}

fn merge(nrows: usize, ncols: usize, mut e: Vec<(usize, usize, f64, f64)>) -> (Csr, Csr) {
    e.par_sort_by_key(|&(i, j, _, _)| (i, j));
    let k: Vec<_> = e.iter().map(|&(i, j, v, _)| (i, j, v)).collect();
    let m: Vec<_> = e.iter().map(|&(i, j, _, v)| (i, j, v)).collect();
    (Csr::from_sorted(nrows, ncols, &k), Csr::from_sorted(nrows, ncols, &m))
}

fn mirror_upper(upper: &Csr) -> Csr {
    let mut e: Vec<_> = upper.triplets().collect();
    e.extend(upper.triplets().filter(|&(i, j, _)| i != j).map(|(i, j, v)| (j, i, v)));
    Csr::from_entries(upper.nrows(), upper.ncols(), e)
}

/// Assembles the free/free matrix `A = K − k²M` and the free/Dirichlet block
/// `D = −(K − k²M)|_{free × Σ}`.
pub fn assemble(mesh: Arc<TriMesh>, k: f64, field: &RefractiveField) -> Result<FemSystem, FemError> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(FemError::InvalidWavenumber(k));
    }
    let basis = LagrangeBasis::new(mesh.degree());
    let nl = mesh.free_nodes().len();
    let nm = mesh.dirichlet_nodes().len();

    let blocks: Vec<ElementBlocks> = (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| {
            let geo = ElementGeometry::new(mesh.triangle_vertices(t));
            let h = geo.diameter();
            if !(geo.area >= 1e-14 * h * h) {
                return Err(FemError::DegenerateTriangle { index: t, area: geo.area });
            }
            let (kl, ml) = element_matrices(&geo, &basis, field);
            let nodes = mesh.element_nodes(t);
            let nloc = nodes.len();
            let mut out = ElementBlocks { ff: Vec::new(), fd: Vec::new() };
            for a in 0..nloc {
                let NodeRole::Free(i) = mesh.role(nodes[a]) else { continue };
                for b in 0..nloc {
                    let (kv, mv) = (kl[a * nloc + b], ml[a * nloc + b]);
                    match mesh.role(nodes[b]) {
                        NodeRole::Free(j) if i <= j => out.ff.push((i, j, kv, mv)),
                        NodeRole::Free(_) => {}
                        NodeRole::Dirichlet(j) => out.fd.push((i, j, kv, mv)),
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_, _>>()?;

    let mut ff = Vec::new();
    let mut fd = Vec::new();
    for b in blocks {
        ff.extend(b.ff);
        fd.extend(b.fd);
    }
    let (k_upper, m_upper) = merge(nl, nl, ff);
    let stiffness = mirror_upper(&k_upper);
    let mass = mirror_upper(&m_upper);
    let (k_fd, m_fd) = merge(nl, nm, fd);
    let a = stiffness.add_scaled(-k * k, &mass);
    let mut d = k_fd.add_scaled(-k * k, &m_fd);
    let e: Vec<_> = d.triplets().map(|(i, j, v)| (i, j, -v)).collect();
    d = Csr::from_sorted(nl, nm, &e);
    Ok(FemSystem { mesh, k, field: field.clone(), stiffness, mass, a, d, factor: None })
}

impl FemSystem {
    pub fn mesh(&self) -> &Arc<TriMesh> {
        &self.mesh
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn field(&self) -> &RefractiveField {
        &self.field
    }

    /// `∫∇φ_j·∇φ_i` over free nodes.
    pub fn stiffness(&self) -> &Csr {
        &self.stiffness
    }

    /// `∫n²φ_jφ_i` over free nodes.
    pub fn mass(&self) -> &Csr {
        &self.mass
    }

    pub fn matrix(&self) -> &Csr {
        &self.a
    }

    pub fn coupling(&self) -> &Csr {
        &self.d
    }

    pub fn is_factorized(&self) -> bool {
        self.factor.is_some()
    }

    pub fn factor(&self) -> Option<&LbltFactor> {
        self.factor.as_ref()
    }

    pub fn factorize(mut self) -> Result<Self, FemError> {
        let scale = self.stiffness.max_abs_diag() + self.k * self.k * self.mass.max_abs_diag();
        self.factor = Some(LbltFactor::with_scale(&self.a, scale)?);
        Ok(self)
    }

    /// Solves `A x = b` for complex right-hand sides, splitting real and
    /// imaginary parts into separate real columns.
    pub fn solve_free(&self, rhs: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>, FemError> {
        let factor = self.factor.as_ref().ok_or(FemError::NotFactorized)?;
        let n = self.a.nrows();
        for r in rhs {
            if r.len() != n {
                return Err(FemError::DimensionMismatch { expected: n, got: r.len() });
            }
        }
        let chunks: Vec<Vec<Vec<Complex64>>> = rhs
            .par_chunks(SOLVE_BLOCK)
            .map(|chunk| {
                let mut m = Mat::<f64>::from_fn(n, 2 * chunk.len(), |i, c| {
                    let z = chunk[c / 2][i];
                    if c % 2 == 0 { z.re } else { z.im }
                });
                factor.solve_in_place(m.as_mut());
                (0..chunk.len())
                    .map(|c| (0..n).map(|i| Complex64::new(m[(i, 2 * c)], m[(i, 2 * c + 1)])).collect())
                    .collect()
            })
            .collect();
        Ok(chunks.into_iter().flatten().collect())
    }

    fn check_dirichlet(&self, f: &[Complex64]) -> Result<(), FemError> {
        let m = self.mesh.dirichlet_nodes().len();
        if f.len() != m {
            return Err(FemError::DimensionMismatch { expected: m, got: f.len() });
        }
        Ok(())
    }

    /// Free-node values `A⁻¹ D f` for each Dirichlet data vector.
    pub fn solve_dirichlet_free(&self, data: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>, FemError> {
        for f in data {
            self.check_dirichlet(f)?;
        }
        let rhs: Vec<_> = data.iter().map(|f| self.d.matvec_complex(f)).collect();
        self.solve_free(&rhs)
    }

    fn assemble_solution(&self, free: Vec<Complex64>, f: &[Complex64]) -> FemSolution {
        let mut values = vec![Complex64::new(0.0, 0.0); self.mesh.n_nodes()];
        for (&g, v) in self.mesh.free_nodes().iter().zip(free) {
            values[g] = v;
        }
        for (&g, &v) in self.mesh.dirichlet_nodes().iter().zip(f) {
            values[g] = v;
        }
        FemSolution::new(self.mesh.clone(), values)
    }

    /// Discrete solution with Dirichlet data `f_sigma` on Σ.
    pub fn solve_dirichlet(&self, f_sigma: &[Complex64]) -> Result<FemSolution, FemError> {
        self.check_dirichlet(f_sigma)?;
        let free = self.solve_dirichlet_free(&[f_sigma.to_vec()])?.pop().unwrap();
        Ok(self.assemble_solution(free, f_sigma))
    }

    pub fn solve_dirichlet_many(&self, data: &[Vec<Complex64>]) -> Result<Vec<FemSolution>, FemError> {
        let free = self.solve_dirichlet_free(data)?;
        Ok(free.into_iter().zip(data).map(|(u, f)| self.assemble_solution(u, f)).collect())
    }

    /// `‖A u_free − D f‖ / ‖D f‖` for a solution of this system.
    pub fn relative_residual(&self, solution: &FemSolution) -> f64 {
        let free: Vec<_> = self.mesh.free_nodes().iter().map(|&g| solution.values()[g]).collect();
        let f: Vec<_> = self.mesh.dirichlet_nodes().iter().map(|&g| solution.values()[g]).collect();
        let au = self.a.matvec_complex(&free);
        let df = self.d.matvec_complex(&f);
        let num: f64 = au.iter().zip(&df).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        let den: f64 = df.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if den == 0.0 { num } else { num / den }
    }
}

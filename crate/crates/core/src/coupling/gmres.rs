use num_complex::Complex64;

/// Result of an unrestarted GMRES run.
#[derive(Clone, Debug)]
pub struct GmresOutcome {
    pub solution: Vec<Complex64>,
    /// Relative residual estimate after each iteration, starting with `1` for the zero guess.
    pub history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Solves `A x = b` from the zero initial guess with modified Gram–Schmidt
/// Arnoldi (two passes) and Givens rotations, stopping once the residual
/// estimate drops to `tol‖b‖` or after `max_iter` steps.
pub fn gmres<A, E>(mut apply: A, b: &[Complex64], tol: f64, max_iter: usize) -> Result<GmresOutcome, E>
where
    A: FnMut(&[Complex64]) -> Result<Vec<Complex64>, E>,
{
    let n = b.len();
    let beta = norm(b);
    let zero = vec![Complex64::new(0.0, 0.0); n];
    if beta == 0.0 {
        return Ok(GmresOutcome { solution: zero, history: vec![0.0], iterations: 0, converged: true });
    }
    let mut basis: Vec<Vec<Complex64>> = vec![b.iter().map(|z| z / beta).collect()];
    // columns of the Hessenberg matrix after rotation, i.e. the upper triangle R
    let mut r: Vec<Vec<Complex64>> = Vec::new();
    let mut rotations: Vec<(f64, Complex64)> = Vec::new();
    let mut g = vec![Complex64::new(beta, 0.0)];
    let mut history = vec![1.0];
    let mut converged = false;

    while r.len() < max_iter {
        let j = r.len();
        let mut w = apply(&basis[j])?;
        let mut h = vec![Complex64::new(0.0, 0.0); j + 2];
        for _pass in 0..2 {
            for (i, v) in basis.iter().enumerate() {
                let c = dot(v, &w);
                h[i] += c;
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk -= c * vk;
                }
            }
        }
        let hn = norm(&w);
        h[j + 1] = Complex64::new(hn, 0.0);
        for (i, &(c, s)) in rotations.iter().enumerate() {
            let (a, bb) = (h[i], h[i + 1]);
            h[i] = c * a + s * bb;
            h[i + 1] = -s.conj() * a + c * bb;
        }
        let (a, bb) = (h[j], h[j + 1]);
        let rho = (a.norm_sqr() + bb.norm_sqr()).sqrt();
        let (c, s) = if rho == 0.0 {
            (1.0, Complex64::new(0.0, 0.0))
        } else if a.norm() == 0.0 {
            (0.0, bb.conj() / bb.norm())
        } else {
            let c = a.norm() / rho;
            (c, (a / a.norm()) * bb.conj() / rho)
        };
        h[j] = c * a + s * bb;
        h.truncate(j + 1);
        rotations.push((c, s));
        let gj = g[j];
        g[j] = c * gj;
        g.push(-s.conj() * gj);
        r.push(h);
        let res = g[j + 1].norm() / beta;
        history.push(res);
        if res <= tol {
            converged = true;
            break;
        }
        if hn <= 1e-14 * beta {
            // happy breakdown: the Krylov space is invariant
            converged = true;
            break;
        }
        basis.push(w.iter().map(|z| z / hn).collect());
    }

    let m = r.len();
    let mut y = vec![Complex64::new(0.0, 0.0); m];
    for i in (0..m).rev() {
        let mut s = g[i];
        for (jj, yj) in y.iter().enumerate().skip(i + 1) {
            s -= r[jj][i] * yj;
        }
        y[i] = s / r[i][i];
    }
    let mut x = zero;
    for (v, yi) in basis.iter().zip(&y) {
        for (xk, vk) in x.iter_mut().zip(v) {
            *xk += yi * vk;
        }
    }
    Ok(GmresOutcome { solution: x, history, iterations: m, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_system(n: usize, seed: u64) -> (Vec<Vec<Complex64>>, Vec<Complex64>) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut c = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let a: Vec<Vec<Complex64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Complex64::new(3.0, 0.0) } else { Complex64::new(0.0, 0.0) } + c() * 0.1).collect())
            .collect();
        let b = (0..n).map(|_| c()).collect();
        (a, b)
    }

    fn matvec(a: &[Vec<Complex64>], x: &[Complex64]) -> Vec<Complex64> {
        a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
    }

    #[test]
    fn solves_dense_system() {
        let (a, b) = random_system(30, 1);
        let out = gmres::<_, ()>(|x| Ok(matvec(&a, x)), &b, 1e-12, 300).unwrap();
        assert!(out.converged);
        let r = matvec(&a, &out.solution);
        let res: f64 = r.iter().zip(&b).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt() / norm(&b);
        assert!(res < 1e-11, "{res}");
        // the recorded estimate matches the true residual
        assert!((out.history.last().unwrap() - res).abs() < 1e-11);
        assert!(out.history.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }

    #[test]
    fn zero_rhs_takes_no_iterations() {
        let out = gmres::<_, ()>(|x| Ok(x.to_vec()), &[Complex64::new(0.0, 0.0); 4], 1e-8, 10).unwrap();
        assert_eq!(out.iterations, 0);
        assert!(out.solution.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn identity_converges_in_one_step() {
        let b = vec![Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.0)];
        let out = gmres::<_, ()>(|x| Ok(x.to_vec()), &b, 1e-12, 10).unwrap();
        assert_eq!(out.iterations, 1);
        assert!((out.solution[0] - b[0]).norm() < 1e-15);
    }

    #[test]
    fn reports_non_convergence() {
        let (a, b) = random_system(20, 2);
        let out = gmres::<_, ()>(|x| Ok(matvec(&a, x)), &b, 1e-14, 2).unwrap();
        assert!(!out.converged);
        assert_eq!(out.iterations, 2);
    }
}

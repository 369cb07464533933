use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::fmt::Write as _;
use std::path::Path;

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{BemError, NystromGrid};
use crate::geometry::{point_in_polygon, polygon_distance, Point};
use crate::special::bessel01;

/// Combined-field kernel `∇_yΦ(z − y)·μ − ikΦ(z − y)` at `y = x(t_j)`.
fn combined_kernel(k: f64, z: Point, y: Point, mu: Point) -> Complex64 {
    let d = [z[0] - y[0], z[1] - y[1]];
    let r = d[0].hypot(d[1]);
    let b = bessel01(k * r);
    let dl = Complex64::new(0.0, 0.25 * k) * b.h1() * ((mu[0] * d[0] + mu[1] * d[1]) / r);
    let sl = Complex64::new(0.0, 0.25) * b.h0();
    dl - Complex64::new(0.0, k) * sl
}

/// Checks that every point lies strictly outside Γ and warns when a point is
/// closer than `2π/N · max|x'|`.
fn check_exterior(grid: &NystromGrid, points: &[Point]) -> Result<(), BemError> {
    let poly = grid.curve().polygon((8 * grid.len()).max(4096))?;
    let near = TAU / grid.n() as f64 * grid.max_speed();
    let mut warned = 0usize;
    for &p in points {
        if point_in_polygon(p, &poly) {
            return Err(BemError::InsideGamma(p));
        }
        let d = polygon_distance(p, &poly);
        if d == 0.0 {
            return Err(BemError::InsideGamma(p));
        }
        if d < near {
            warned += 1;
        }
    }
    if warned > 0 {
        log::warn!("{warned} evaluation points lie within {near:.3e} of Γ; potential accuracy is reduced");
    }
    Ok(())
}

/// Discrete potential matrix `P`, mapping a density to the combined potential
/// `DL − ik SL` at `points` by the trapezoidal rule.
pub fn potential_matrix(grid: &NystromGrid, k: f64, points: &[Point]) -> Result<Mat<Complex64>, BemError> {
    check_exterior(grid, points)?;
    let h = grid.spacing();
    let rows: Vec<Vec<Complex64>> = points
        .par_iter()
        .map(|&z| grid.samples().iter().map(|s| combined_kernel(k, z, s.point, s.mu()) * h).collect())
        .collect();
    Ok(Mat::from_fn(points.len(), grid.len(), |i, j| rows[i][j]))
}

/// Combined potential of density `phi` at exterior `points`.
pub fn eval_potentials(grid: &NystromGrid, k: f64, phi: &[Complex64], points: &[Point]) -> Result<Vec<Complex64>, BemError> {
    if phi.len() != grid.len() {
        return Err(BemError::DimensionMismatch { expected: grid.len(), got: phi.len() });
    }
    check_exterior(grid, points)?;
    let h = grid.spacing();
    Ok(points
        .par_iter()
        .map(|&z| {
            grid.samples().iter().zip(phi).map(|(s, &p)| combined_kernel(k, z, s.point, s.mu()) * p).sum::<Complex64>() * h
        })
        .collect())
}

/// Single-layer potential alone (no `−ik` factor), used for checks.
pub fn eval_single_layer(grid: &NystromGrid, k: f64, phi: &[Complex64], points: &[Point]) -> Result<Vec<Complex64>, BemError> {
    check_exterior(grid, points)?;
    let h = grid.spacing();
    Ok(points
        .iter()
        .map(|&z| {
            grid.samples()
                .iter()
                .zip(phi)
                .map(|(s, &p)| {
                    let r = (z[0] - s.point[0]).hypot(z[1] - s.point[1]);
                    Complex64::new(0.0, 0.25) * bessel01(k * r).h0() * p
                })
                .sum::<Complex64>()
                * h
        })
        .collect())
}

/// Far-field pattern
/// `√(k/8π) e^{−iπ/4} (π/N) Σ_j e^{−ik z·x(t_j)} [z·μ(t_j) + 1] φ_j`.
pub fn far_field(grid: &NystromGrid, k: f64, phi: &[Complex64], directions: &[Point]) -> Result<Vec<Complex64>, BemError> {
    if phi.len() != grid.len() {
        return Err(BemError::DimensionMismatch { expected: grid.len(), got: phi.len() });
    }
    for &z in directions {
        let norm = z[0].hypot(z[1]);
        if !((norm - 1.0).abs() <= 1e-12) {
            return Err(BemError::NonUnitDirection(z));
        }
    }
    let pre = (k / (8.0 * PI)).sqrt() * Complex64::from_polar(1.0, -FRAC_PI_4) * grid.spacing();
    Ok(directions
        .par_iter()
        .map(|&z| {
            grid.samples()
                .iter()
                .zip(phi)
                .map(|(s, &p)| {
                    let mu = s.mu();
                    let phase = Complex64::from_polar(1.0, -k * (z[0] * s.point[0] + z[1] * s.point[1]));
                    phase * (z[0] * mu[0] + z[1] * mu[1] + 1.0) * p
                })
                .sum::<Complex64>()
                * pre
        })
        .collect())
}

/// `n` uniformly spaced angles in `[0, 2π)`.
pub fn uniform_angles(n: usize) -> Vec<f64> {
    (0..n).map(|j| TAU * j as f64 / n as f64).collect()
}

pub fn directions_from_angles(angles: &[f64]) -> Vec<Point> {
    angles.iter().map(|a| [a.cos(), a.sin()]).collect()
}

/// CSV text with header `theta,re,im,abs`.
pub fn far_field_csv(angles: &[f64], values: &[Complex64]) -> String {
    let mut s = String::from("theta,re,im,abs\n");
    for (t, v) in angles.iter().zip(values) {
        writeln!(s, "{t:.17e},{:.17e},{:.17e},{:.17e}", v.re, v.im, v.norm()).unwrap();
    }
    s
}

pub fn write_far_field_csv(path: &Path, angles: &[f64], values: &[Complex64]) -> std::io::Result<()> {
    std::fs::write(path, far_field_csv(angles, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bem::BemSystem;
    use crate::geometry::SmoothCurve;
    use crate::special::{bessel_j, hankel1};
    use rand::{Rng, SeedableRng};

    #[test]
    fn zero_density_gives_zero() {
        let g = NystromGrid::new(SmoothCurve::circle(1.0), 8).unwrap();
        let z = vec![Complex64::new(0.0, 0.0); 16];
        assert!(eval_potentials(&g, 1.0, &z, &[[3.0, 0.0]]).unwrap()[0].norm() == 0.0);
        assert!(far_field(&g, 1.0, &z, &[[0.0, 1.0]]).unwrap()[0].norm() == 0.0);
    }

    #[test]
    fn single_layer_of_constant_density() {
        let g = NystromGrid::new(SmoothCurve::circle(1.0), 32).unwrap();
        let one = vec![Complex64::new(1.0, 0.0); 64];
        let v = eval_single_layer(&g, 1.0, &one, &[[2.0, 0.0], [0.0, -2.0]]).unwrap();
        let expect = Complex64::new(0.0, PI) * bessel_j(0, 1.0) * hankel1(0, 2.0) / 2.0;
        for x in v {
            assert!((x - expect).norm() < 1e-13, "{x} {expect}");
        }
    }

    #[test]
    fn inside_point_is_rejected() {
        let g = NystromGrid::new(SmoothCurve::circle(1.0), 8).unwrap();
        let z = vec![Complex64::new(1.0, 0.0); 16];
        assert!(matches!(eval_potentials(&g, 1.0, &z, &[[0.2, 0.1]]), Err(BemError::InsideGamma(_))));
        assert!(matches!(far_field(&g, 1.0, &z, &[[2.0, 0.0]]), Err(BemError::NonUnitDirection(_))));
    }

    #[test]
    fn potential_satisfies_helmholtz() {
        let k = 2.0;
        let g = NystromGrid::new(SmoothCurve::rounded_square(), 16).unwrap();
        let phi: Vec<_> = (0..32).map(|j| Complex64::new((j as f64 * 0.4).cos(), 0.2 * j as f64)).collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let h = 1e-3;
        for _ in 0..10 {
            let a: f64 = rng.random_range(0.0..TAU);
            let r: f64 = rng.random_range(9.0..15.0);
            let p = [r * a.cos(), r * a.sin()];
            let pts = [p, [p[0] + h, p[1]], [p[0] - h, p[1]], [p[0], p[1] + h], [p[0], p[1] - h]];
            let v = eval_potentials(&g, k, &phi, &pts).unwrap();
            let lap = (v[1] + v[2] + v[3] + v[4] - 4.0 * v[0]) / (h * h);
            assert!((lap + k * k * v[0]).norm() <= 1e-4 * (k * k * v[0]).norm());
        }
    }

    #[test]
    fn exterior_trace_reproduces_radiating_solution() {
        // a point source inside Γ generates boundary data; the combined
        // potential must reproduce it outside
        let k = 3.0;
        let src = [0.3, -0.2];
        let exact = |p: Point| Complex64::new(0.0, 0.25) * hankel1(0, k * (p[0] - src[0]).hypot(p[1] - src[1]));
        let grid = NystromGrid::new(SmoothCurve::rounded_square(), 96).unwrap();
        let data: Vec<_> = grid.points().into_iter().map(exact).collect();
        let sys = BemSystem::assemble(grid.clone(), k).unwrap();
        let phi = sys.solve_density(&data).unwrap();
        let pts = [[8.0, 1.0], [-3.0, 7.5], [0.0, -9.0]];
        let v = eval_potentials(&grid, k, &phi, &pts).unwrap();
        for (p, x) in pts.iter().zip(v) {
            assert!((x - exact(*p)).norm() < 1e-9 * exact(*p).norm(), "{x} {}", exact(*p));
        }
    }

    #[test]
    fn far_field_matches_far_potential() {
        let k = 2.0;
        let grid = NystromGrid::new(SmoothCurve::circle(1.0), 16).unwrap();
        let phi: Vec<_> = (0..32).map(|j| Complex64::new(1.0 + (j as f64).sin(), 0.5)).collect();
        let z = [0.6, 0.8];
        let r = 1e5;
        let w = eval_potentials(&grid, k, &phi, &[[r * z[0], r * z[1]]]).unwrap()[0];
        let f = far_field(&grid, k, &phi, &[z]).unwrap()[0];
        let approx = Complex64::from_polar(1.0, k * r) / r.sqrt() * f;
        assert!((w - approx).norm() < 1e-4 * approx.norm());
    }

    #[test]
    fn csv_layout() {
        let s = far_field_csv(&[0.0, 1.0], &[Complex64::new(1.0, 0.0), Complex64::new(0.0, -2.0)]);
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines[0], "theta,re,im,abs");
        assert_eq!(lines.len(), 3);
    }
}

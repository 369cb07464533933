use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

/// Composite midpoint rule on `[0, 2π)` with `n` points; spectrally accurate
/// for smooth periodic integrands.
pub fn brute_quadrature<F: Fn(f64) -> Complex64>(f: F, n: usize) -> Complex64 {
    let h = TAU / n as f64;
    (0..n).map(|j| f((j as f64 + 0.5) * h)).sum::<Complex64>() * h
}

/// `∫₀^{2π} log sin²(t/2) f(t) dt` for smooth periodic `f`, by subtracting
/// `f(0)` and integrating the constant part through the smooth remainder
/// `log sin²(t/2) − log(t²(2π−t)²)` plus its closed-form singular part.
pub fn brute_log_quadrature<F: Fn(f64) -> Complex64>(f: F, n: usize) -> Complex64 {
    let f0 = f(0.0);
    let h = TAU / n as f64;
    let mut rest = Complex64::new(0.0, 0.0);
    let mut smooth = 0.0;
    for j in 0..n {
        let t = (j as f64 + 0.5) * h;
        let ls = (0.5 * t).sin().powi(2).ln();
        rest += (f(t) - f0) * ls;
        smooth += ls - (t * t * (TAU - t) * (TAU - t)).ln();
    }
    // ∫₀^{2π} log(t²(2π−t)²) dt = 4(2π log 2π − 2π)
    let singular = 4.0 * (TAU * TAU.ln() - TAU);
    rest * h + f0 * (smooth * h + singular)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// `∫₀^{2π} f(t) dt` for `f` with integrable (e.g. logarithmic) endpoint
/// singularities at `0` and `2π`: Gauss–Legendre panels graded geometrically
/// by a factor `0.15` toward both ends, `levels` panels per side.
pub fn graded_quadrature<F: Fn(f64) -> Complex64>(f: F, levels: usize) -> Complex64 {
    let gl = gauss_legendre(20);
    let sigma: f64 = 0.15;
    let mut edges = vec![0.0];
    for l in (0..levels).rev() {
        edges.push(PI * sigma.powi(l as i32));
    }
    let mut total = Complex64::new(0.0, 0.0);
    let mut panel = |a: f64, b: f64| {
        let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
        for &(x, w) in &gl {
            total += f(m + r * x) * (w * r);
        }
    };
    for w in edges.windows(2) {
        panel(w[0], w[1]);
        panel(TAU - w[1], TAU - w[0]);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_integrals() {
        let one = brute_log_quadrature(|_| Complex64::new(1.0, 0.0), 1_000_000);
        assert!((one.re + TAU * 4f64.ln()).abs() < 1e-8, "{one}");
        let c = brute_log_quadrature(|t| Complex64::new(t.cos(), 0.0), 1_000_000);
        assert!((c.re + TAU).abs() < 1e-7, "{c}");
    }

    #[test]
    fn smooth_integral() {
        assert!(brute_quadrature(|t| Complex64::new(t.cos(), 0.0), 64).norm() < 1e-12);
    }

    #[test]
    fn gauss_legendre_exactness() {
        let gl = gauss_legendre(10);
        for p in 0..20 {
            let got: f64 = gl.iter().map(|(x, w)| w * x.powi(p)).sum();
            let expect = if p % 2 == 0 { 2.0 / (p as f64 + 1.0) } else { 0.0 };
            assert!((got - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn graded_handles_log_singularity() {
        let g = graded_quadrature(|t| Complex64::new((0.5 * t).sin().powi(2).ln() * (2.0 * t).cos(), 0.0), 40);
        // ℓ = 2 identity: −2π/2
        assert!((g.re + PI).abs() < 1e-12, "{g}");
    }
}

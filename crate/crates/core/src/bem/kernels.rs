use std::f64::consts::PI;

use num_complex::Complex64;

use crate::geometry::CurveSample;
use crate::special::{bessel01, EULER_GAMMA};

/// Smooth factors of the single- and double-layer kernels,
/// `M(s,t) = A log sin²((s−t)/2) + B` and `L(s,t) = C log sin²((s−t)/2) + D`,
/// where `M = Φ_k(x(s) − x(t))` and `L = ∇_yΦ_k(x(s) − y)|_{y=x(t)} · μ(t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitKernels {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

/// Evaluates the split kernels for parameters `s`, `t` with samples `xs = x(s)`,
/// `xt = x(t)`. When `s = t` the diagonal limits are returned.
pub fn split_kernels(k: f64, s: f64, t: f64, xs: &CurveSample, xt: &CurveSample) -> SplitKernels {
    let dx = [xs.point[0] - xt.point[0], xs.point[1] - xt.point[1]];
    let r = dx[0].hypot(dx[1]);
    if s == t || r == 0.0 {
        let speed = xt.speed();
        let a = Complex64::new(-1.0 / (4.0 * PI), 0.0);
        let b = Complex64::new(-EULER_GAMMA / (2.0 * PI) - (k * speed).ln() / (2.0 * PI), 0.25);
        let mu = xt.mu();
        let d = (mu[0] * xt.second[0] + mu[1] * xt.second[1]) / (4.0 * PI * speed * speed);
        return SplitKernels { a, b, c: Complex64::new(0.0, 0.0), d: Complex64::new(d, 0.0) };
    }
    let bes = bessel01(k * r);
    let logsin = ((0.5 * (s - t)).sin().powi(2)).ln();
    let phi = Complex64::new(0.0, 0.25) * bes.h0();
    let a = Complex64::new(-bes.j0 / (4.0 * PI), 0.0);
    let mu = xt.mu();
    let proj = mu[0] * dx[0] + mu[1] * dx[1];
    let l = Complex64::new(0.0, 0.25 * k) * bes.h1() * (proj / r);
    let c = Complex64::new(-k / (4.0 * PI) * proj * bes.j1 / r, 0.0);
    SplitKernels { a, b: phi - a * logsin, c, d: l - c * logsin }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SmoothCurve;
    use crate::special::helmholtz_green;

    #[test]
    fn off_diagonal_reconstruction_unit_circle() {
        let c = SmoothCurve::circle(1.0);
        let (xs, xt) = (c.eval(0.0).unwrap(), c.eval(PI).unwrap());
        let sk = split_kernels(1.0, 0.0, PI, &xs, &xt);
        let got = sk.a * (0.5 * PI).sin().powi(2).ln() + sk.b;
        assert!((got - helmholtz_green(1.0, 2.0)).norm() < 1e-15);
    }

    fn limit_check(curve: &SmoothCurve, k: f64, t: f64) {
        let xt = curve.eval(t).unwrap();
        let diag = split_kernels(k, t, t, &xt, &xt);
        let h = 1e-4;
        let (xp, xm) = (curve.eval(t + h).unwrap(), curve.eval(t - h).unwrap());
        let (p, m) = (split_kernels(k, t + h, t, &xp, &xt), split_kernels(k, t - h, t, &xm, &xt));
        let near = SplitKernels { a: 0.5 * (p.a + m.a), b: 0.5 * (p.b + m.b), c: 0.5 * (p.c + m.c), d: 0.5 * (p.d + m.d) };
        assert!((near.a - diag.a).norm() < 1e-6, "A {near:?} {diag:?}");
        assert!((near.b - diag.b).norm() < 1e-6, "B {:?} {:?}", near.b, diag.b);
        assert!((near.c - diag.c).norm() < 1e-6, "C");
        assert!((near.d - diag.d).norm() < 1e-6, "D {:?} {:?}", near.d, diag.d);
    }

    #[test]
    fn diagonal_limits_match_numerical_limits() {
        for curve in [
            SmoothCurve::circle(1.0),
            SmoothCurve::rounded_square(),
            SmoothCurve::Ellipse { center: [0.2, 0.1], semi_axes: [1.5, 0.7] },
        ] {
            for &t in &[0.3, 1.7, 4.0] {
                limit_check(&curve, 2.5, t);
            }
        }
        let c = SmoothCurve::circle(1.0).eval(0.4).unwrap();
        let d = split_kernels(1.0, 0.4, 0.4, &c, &c);
        assert!((d.a.re + 1.0 / (4.0 * PI)).abs() < 1e-16);
        assert!((d.d.re + 1.0 / (4.0 * PI)).abs() < 1e-16);
    }
}

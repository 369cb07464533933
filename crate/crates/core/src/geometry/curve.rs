use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use super::{GeometryError, Point};

/// Position and derivatives of a parameterisation at one `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveSample {
    pub point: Point,
    pub tangent: Point,
    pub second: Point,
}

impl CurveSample {
    /// `μ(t) = (x₂'(t), −x₁'(t))`, the outward normal scaled by `|x'(t)|`.
    pub fn mu(&self) -> Point {
        [self.tangent[1], -self.tangent[0]]
    }

    pub fn speed(&self) -> f64 {
        self.tangent[0].hypot(self.tangent[1])
    }

    /// Signed curvature times `|x'|²`, i.e. `x₁'x₂'' − x₂'x₁''`.
    pub fn cross(&self) -> f64 {
        self.tangent[0] * self.second[1] - self.tangent[1] * self.second[0]
    }
}

type CurveFn = dyn Fn(f64) -> CurveSample + Send + Sync;

/// A smooth, 2π-periodic, counter-clockwise parameterisation of a closed curve.
#[derive(Clone)]
pub enum SmoothCurve {
    Circle { center: Point, radius: f64 },
    Ellipse { center: Point, semi_axes: [f64; 2] },
    /// `s · ((1+cos²t)cos t + (1+sin²t)sin t, (1+sin²t)sin t − (1+cos²t)cos t)`,
    /// a rounded square rotated by 45°. `s = 7√2/4` gives the curve used for
    /// the polygonal-heterogeneity experiments.
    RoundedSquare { scale: f64 },
    /// User-supplied parameterisation returning `x, x', x''`.
    Custom { name: String, eval: Arc<CurveFn> },
}

impl fmt::Debug for SmoothCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Circle { center, radius } => f
                .debug_struct("Circle")
                .field("center", center)
                .field("radius", radius)
                .finish(),
            Self::Ellipse { center, semi_axes } => f
                .debug_struct("Ellipse")
                .field("center", center)
                .field("semi_axes", semi_axes)
                .finish(),
            Self::RoundedSquare { scale } => {
                f.debug_struct("RoundedSquare").field("scale", scale).finish()
            }
            Self::Custom { name, .. } => f.debug_struct("Custom").field("name", name).finish(),
        }
    }
}

impl SmoothCurve {
    pub fn circle(radius: f64) -> Self {
        Self::Circle { center: [0.0, 0.0], radius }
    }

    /// The rounded square with `scale = 7√2/4`.
    pub fn rounded_square() -> Self {
        Self::RoundedSquare { scale: 7.0 * 2f64.sqrt() / 4.0 }
    }

    pub fn custom<F>(name: impl Into<String>, eval: F) -> Self
    where
        F: Fn(f64) -> CurveSample + Send + Sync + 'static,
    {
        Self::Custom { name: name.into(), eval: Arc::new(eval) }
    }

    fn raw(&self, t: f64) -> CurveSample {
        match self {
            Self::Circle { center, radius } => {
                let (s, c) = t.sin_cos();
                CurveSample {
                    point: [center[0] + radius * c, center[1] + radius * s],
                    tangent: [-radius * s, radius * c],
                    second: [-radius * c, -radius * s],
                }
            }
            Self::Ellipse { center, semi_axes: [a, b] } => {
                let (s, c) = t.sin_cos();
                CurveSample {
                    point: [center[0] + a * c, center[1] + b * s],
                    tangent: [-a * s, b * c],
                    second: [-a * c, -b * s],
                }
            }
            Self::RoundedSquare { scale } => {
                let (s, c) = t.sin_cos();
                let a = c + c * c * c;
                let b = s + s * s * s;
                let da = -s - 3.0 * c * c * s;
                let db = c + 3.0 * s * s * c;
                let dda = -c + 6.0 * c * s * s - 3.0 * c * c * c;
                let ddb = -s + 6.0 * s * c * c - 3.0 * s * s * s;
                CurveSample {
                    point: [scale * (a + b), scale * (b - a)],
                    tangent: [scale * (da + db), scale * (db - da)],
                    second: [scale * (dda + ddb), scale * (ddb - dda)],
                }
            }
            Self::Custom { eval, .. } => eval(t),
        }
    }

    /// Evaluates the parameterisation at `t` (reduced mod 2π).
    pub fn eval(&self, t: f64) -> Result<CurveSample, GeometryError> {
        let t = t.rem_euclid(TAU);
        let s = self.raw(t);
        let finite = s.point.iter().chain(&s.tangent).chain(&s.second).all(|v| v.is_finite());
        if !finite {
            return Err(GeometryError::NonFiniteCurve { t });
        }
        Ok(s)
    }

    /// Samples at `t_j = 2πj/n`, `j = 0..n`.
    pub fn sample(&self, n: usize) -> Result<Vec<CurveSample>, GeometryError> {
        (0..n).map(|j| self.eval(TAU * j as f64 / n as f64)).collect()
    }

    /// Checks regularity and counter-clockwise orientation on `n` uniform
    /// samples of a periodic curve.
    pub fn validate(&self, n: usize) -> Result<(), GeometryError> {
        let samples = self.sample(n)?;
        for (j, s) in samples.iter().enumerate() {
            let t = TAU * j as f64 / n as f64;
            if !(s.speed() > 0.0) {
                return Err(GeometryError::IrregularCurve { t });
            }
            // compare against the unreduced parameter one period later
            let shifted = self.raw(t + TAU);
            let gap = (shifted.point[0] - s.point[0]).hypot(shifted.point[1] - s.point[1]);
            let scale = s.point[0].abs() + s.point[1].abs() + 1.0;
            if gap > 1e-12 * scale {
                return Err(GeometryError::NonPeriodicCurve { t, gap });
            }
        }
        if self.signed_area(&samples) <= 0.0 {
            return Err(GeometryError::ClockwiseCurve);
        }
        Ok(())
    }

    /// Enclosed signed area by the trapezoidal rule on `½∮(x dy − y dx)`.
    pub fn signed_area(&self, samples: &[CurveSample]) -> f64 {
        let h = TAU / samples.len() as f64;
        0.5 * h
            * samples
                .iter()
                .map(|s| s.point[0] * s.tangent[1] - s.point[1] * s.tangent[0])
                .sum::<f64>()
    }

    /// Polygonal approximation with `n` vertices.
    pub fn polygon(&self, n: usize) -> Result<Vec<Point>, GeometryError> {
        Ok(self.sample(n)?.into_iter().map(|s| s.point).collect())
    }

    /// Largest `|x'(t)|` over `n` samples.
    pub fn max_speed(&self, n: usize) -> Result<f64, GeometryError> {
        Ok(self.sample(n)?.iter().map(CurveSample::speed).fold(0.0, f64::max))
    }
}

/// Winding-number test against a closed polygon (vertices in order).
pub fn point_in_polygon(p: Point, poly: &[Point]) -> bool {
    let mut winding = 0i32;
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let cross = (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]);
        if a[1] <= p[1] {
            if b[1] > p[1] && cross > 0.0 {
                winding += 1;
            }
        } else if b[1] <= p[1] && cross < 0.0 {
            winding -= 1;
        }
    }
    winding != 0
}

/// Distance from `p` to the segment `[a, b]`.
pub fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let q = [a[0] + t * d[0], a[1] + t * d[1]];
    (p[0] - q[0]).hypot(p[1] - q[1])
}

/// Distance from `p` to a closed polygon's boundary.
pub fn polygon_distance(p: Point, poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| segment_distance(p, poly[i], poly[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_at_zero() {
        let s = SmoothCurve::circle(3.5).eval(0.0).unwrap();
        assert_eq!(s.point, [3.5, 0.0]);
        assert_eq!(s.mu(), [3.5, 0.0]);
    }

    #[test]
    fn rounded_square_at_zero() {
        let s = SmoothCurve::rounded_square().eval(0.0).unwrap();
        let v = 7.0 * 2f64.sqrt() / 2.0;
        assert!((s.point[0] - v).abs() < 1e-14 && (s.point[1] + v).abs() < 1e-14);
        assert!((v - 4.949_747_468_305_833).abs() < 1e-14);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for curve in [
            SmoothCurve::rounded_square(),
            SmoothCurve::Ellipse { center: [0.3, -0.2], semi_axes: [2.0, 1.0] },
        ] {
            for &t in &[0.0, 0.7, 2.9, 5.5] {
                let s = curve.eval(t).unwrap();
                let p = curve.eval(t + h).unwrap();
                let m = curve.eval(t - h).unwrap();
                for i in 0..2 {
                    let d1 = (p.point[i] - m.point[i]) / (2.0 * h);
                    let d2 = (p.tangent[i] - m.tangent[i]) / (2.0 * h);
                    assert!((d1 - s.tangent[i]).abs() < 1e-8, "{curve:?} t={t}");
                    assert!((d2 - s.second[i]).abs() < 1e-8, "{curve:?} t={t}");
                }
            }
        }
    }

    #[test]
    fn builtin_curves_are_valid_on_fine_samples() {
        for curve in [SmoothCurve::circle(3.5), SmoothCurve::rounded_square()] {
            curve.validate(4096).unwrap();
            for s in curve.sample(4096).unwrap() {
                assert!(s.speed() > 0.0);
            }
        }
    }

    #[test]
    fn clockwise_curve_is_rejected() {
        let cw = SmoothCurve::custom("cw", |t| {
            let (s, c) = t.sin_cos();
            CurveSample { point: [c, -s], tangent: [-s, -c], second: [-c, s] }
        });
        assert!(matches!(cw.validate(64), Err(GeometryError::ClockwiseCurve)));
    }

    #[test]
    fn non_finite_is_an_error() {
        let bad = SmoothCurve::custom("bad", |_| CurveSample {
            point: [f64::NAN, 0.0],
            tangent: [1.0, 0.0],
            second: [0.0, 0.0],
        });
        assert!(matches!(bad.eval(1.0), Err(GeometryError::NonFiniteCurve { .. })));
    }

    #[test]
    fn polygon_tests() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert!(point_in_polygon([0.5, 0.5], &sq));
        assert!(!point_in_polygon([1.5, 0.5], &sq));
        assert!((polygon_distance([0.5, 0.25], &sq) - 0.25).abs() < 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn eval_is_periodic(t in -20.0f64..20.0) {
                let c = SmoothCurve::rounded_square();
                let a = c.eval(t).unwrap();
                let b = c.eval(t + TAU).unwrap();
                prop_assert!((a.point[0] - b.point[0]).abs() < 1e-12);
                prop_assert!((a.point[1] - b.point[1]).abs() < 1e-12);
            }
        }
    }
}

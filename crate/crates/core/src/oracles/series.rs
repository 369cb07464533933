use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::OracleError;
use crate::geometry::Point;
use crate::special::{bessel_j_seq, derivative_seq, hankel1_seq};

/// Hard cap on the modal truncation order.
pub const MAX_MODES: usize = 200;
/// Relative size of the last retained modal coefficient.
const TRUNCATION_TOL: f64 = 1e-16;
/// Default number of RK4 steps across the transition layer of a radial profile.
const RADIAL_STEPS: usize = 4000;

pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Scatterer with rotational symmetry about the origin.
#[derive(Clone)]
pub enum SeriesKind {
    /// Dirichlet disk of radius `a`.
    SoundSoft,
    /// `n = n0` for `r < a`, 1 outside.
    Penetrable { n0: f64 },
    /// `n² = profile(r)` on `[core, a]`, `n0²` below `core` and 1 beyond `a`.
    SmoothRadial { n0: f64, core: f64, profile: Profile },
}

impl fmt::Debug for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SoundSoft => write!(f, "SoundSoft"),
            Self::Penetrable { n0 } => write!(f, "Penetrable {{ n0: {n0} }}"),
            Self::SmoothRadial { n0, core, .. } => write!(f, "SmoothRadial {{ n0: {n0}, core: {core} }}"),
        }
    }
}

/// Interior radial data of one mode: `u(r)` normalised so that the interior
/// field is `c_m u(r)`, plus the start values at the inner radius.
#[derive(Clone, Copy, Debug)]
struct Interior {
    c: Complex64,
    /// `J_m(κ r1)` (zero if it underflows).
    start: f64,
}

/// Modal solution `u = Σ_m i^m [J_m(kr) + b_m H_m(kr)] e^{im(θ−θ_d)}` outside
/// the scatterer.
#[derive(Clone, Debug)]
pub struct SeriesSolution {
    kind: SeriesKind,
    k: f64,
    a: f64,
    angle: f64,
    coeffs: Vec<Complex64>,
    interior: Vec<Interior>,
}

/// `u'' + u'/r + (k²n²(r) − m²/r²)u = 0` by classical RK4 from `(r0, u0, du0)` to `r1`.
fn integrate_radial(k: f64, m: usize, profile: &Profile, r0: f64, r1: f64, u0: f64, du0: f64, steps: usize) -> (f64, f64) {
    let mf = (m * m) as f64;
    let rhs = |r: f64, u: f64, du: f64| -> (f64, f64) { (du, -du / r - (k * k * profile(r) - mf / (r * r)) * u) };
    let h = (r1 - r0) / steps as f64;
    let (mut u, mut du) = (u0, du0);
    for i in 0..steps {
        let r = r0 + h * i as f64;
        let k1 = rhs(r, u, du);
        let k2 = rhs(r + 0.5 * h, u + 0.5 * h * k1.0, du + 0.5 * h * k1.1);
        let k3 = rhs(r + 0.5 * h, u + 0.5 * h * k2.0, du + 0.5 * h * k2.1);
        let k4 = rhs(r + h, u + h * k3.0, du + h * k3.1);
        u += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        du += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
    }
    (u, du)
}

impl SeriesSolution {
    /// Builds the series with adaptive truncation: modes are added until the
    /// last coefficient is below `1e-16` of the largest and the interior
    /// fields are resolved.
    pub fn new(kind: SeriesKind, k: f64, a: f64, incident_angle: f64) -> Result<Self, OracleError> {
        Self::build(kind, k, a, incident_angle, None, RADIAL_STEPS)
    }

    /// Builds the series with exactly `modes + 1` coefficients `b_0..b_modes`.
    pub fn with_truncation(kind: SeriesKind, k: f64, a: f64, incident_angle: f64, modes: usize) -> Result<Self, OracleError> {
        Self::build(kind, k, a, incident_angle, Some(modes), RADIAL_STEPS)
    }

    /// Adaptive series with a chosen RK4 step count for smooth profiles.
    pub fn with_radial_steps(kind: SeriesKind, k: f64, a: f64, incident_angle: f64, steps: usize) -> Result<Self, OracleError> {
        Self::build(kind, k, a, incident_angle, None, steps)
    }

    fn build(kind: SeriesKind, k: f64, a: f64, angle: f64, fixed: Option<usize>, steps: usize) -> Result<Self, OracleError> {
        if !(k > 0.0 && k.is_finite() && a > 0.0 && a.is_finite()) {
            return Err(OracleError::InvalidParameter(format!("need k > 0 and a > 0, got k={k}, a={a}")));
        }
        match &kind {
            SeriesKind::Penetrable { n0 } if !(*n0 > 0.0) => {
                return Err(OracleError::InvalidParameter(format!("n0 must be positive, got {n0}")))
            }
            SeriesKind::SmoothRadial { n0, core, .. } if !(*n0 > 0.0 && *core > 0.0 && *core < a) => {
                return Err(OracleError::InvalidParameter(format!("need n0 > 0 and 0 < core < a, got n0={n0}, core={core}")))
            }
            _ => {}
        }
        let cap = fixed.unwrap_or(MAX_MODES);
        let x = k * a;
        let j = bessel_j_seq(cap + 1, x);
        let h = hankel1_seq(cap + 1, x);
        let dj = derivative_seq(&j);
        let dh = derivative_seq(&h);
        let (kappa, r1) = match &kind {
            SeriesKind::SoundSoft => (0.0, a),
            SeriesKind::Penetrable { n0 } => (k * n0, a),
            SeriesKind::SmoothRadial { n0, core, .. } => (k * n0, *core),
        };
        let (ji, dji) = if kappa > 0.0 {
            let ji = bessel_j_seq(cap + 1, kappa * r1);
            let dji = derivative_seq(&ji);
            (ji, dji)
        } else {
            (Vec::new(), Vec::new())
        };

        // enough modes to resolve the incident and transmitted fields up to r = a
        let index = match &kind {
            SeriesKind::SoundSoft => 1.0,
            SeriesKind::Penetrable { n0 } | SeriesKind::SmoothRadial { n0, .. } => n0.max(1.0),
        };
        let floor = match (x * index).ceil() as usize + 30 {
            f if f <= cap => f,
            // interior field of a very dense disk is not resolved; the exterior still is
            _ => ((x.ceil() as usize) + 30).min(cap),
        };
        let mut coeffs = Vec::new();
        let mut interior = Vec::new();
        let mut largest: f64 = 0.0;
        for m in 0..=cap {
            let (b, inner) = match &kind {
                SeriesKind::SoundSoft => (-j[m] / h[m], Interior { c: Complex64::new(0.0, 0.0), start: 0.0 }),
                _ => {
                    // interior radial solution and its derivative at r = a
                    let (start, dstart) = if ji[m] != 0.0 || dji[m] != 0.0 {
                        (ji[m], kappa * dji[m])
                    } else {
                        (0.0, 0.0)
                    };
                    let (u, du) = match &kind {
                        SeriesKind::SmoothRadial { profile, .. } if start != 0.0 || dstart != 0.0 => {
                            integrate_radial(k, m, profile, r1, a, start, dstart, steps)
                        }
                        _ => (start, dstart),
                    };
                    if u == 0.0 && du == 0.0 {
                        // the mode underflows inside; it then behaves as J_m outside
                        (Complex64::new(0.0, 0.0), Interior { c: Complex64::new(0.0, 0.0), start: 0.0 })
                    } else {
                        let num = du * j[m] - k * u * dj[m];
                        let den = k * u * dh[m] - du * h[m];
                        let b = num / den;
                        let c = if u != 0.0 { (j[m] + b * h[m]) / u } else { Complex64::new(0.0, 0.0) };
                        (b, Interior { c, start })
                    }
                }
            };
            if !(b.re.is_finite() && b.im.is_finite()) {
                return Err(OracleError::NonConvergent(format!("coefficient {m} is not finite")));
            }
            largest = largest.max(b.norm());
            coeffs.push(b);
            interior.push(inner);
            // two small coefficients in a row guard against an isolated zero
            let small = |z: &Complex64, f: f64| z.norm() <= f * TRUNCATION_TOL * largest;
            if fixed.is_none() && m >= floor && small(&b, 1.0) && small(&coeffs[m - 1], 1e3) {
                break;
            }
            if fixed.is_none() && m == cap {
                return Err(OracleError::NonConvergent(format!(
                    "modal coefficients have not decayed below {TRUNCATION_TOL:e} by order {cap}"
                )));
            }
        }
        Ok(Self { kind, k, a, angle, coeffs, interior })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn radius(&self) -> f64 {
        self.a
    }

    pub fn kind(&self) -> &SeriesKind {
        &self.kind
    }

    /// Truncation order `M*`.
    pub fn modes(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `F(θ) = √(2/(πk)) e^{−iπ/4} Σ_m b_m e^{im(θ−θ_d)}` at unit directions.
    pub fn far_field(&self, directions: &[Point]) -> Vec<Complex64> {
        let pre = (2.0 / (PI * self.k)).sqrt() * Complex64::from_polar(1.0, -FRAC_PI_4);
        directions
            .iter()
            .map(|z| {
                let phi = z[1].atan2(z[0]) - self.angle;
                let s: Complex64 = self
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(m, b)| if m == 0 { *b } else { 2.0 * b * (m as f64 * phi).cos() })
                    .sum();
                pre * s
            })
            .collect()
    }

    /// Total field at arbitrary points (incident plus scattered outside, the
    /// transmitted series inside a penetrable disk).
    pub fn near_field(&self, points: &[Point]) -> Result<Vec<Complex64>, OracleError> {
        points.iter().map(|&p| self.near_field_at(p)).collect()
    }

    fn near_field_at(&self, p: Point) -> Result<Complex64, OracleError> {
        let r = p[0].hypot(p[1]);
        let phi = p[1].atan2(p[0]) - self.angle;
        let mmax = self.modes();
        let i_pow = |m: usize| Complex64::new(0.0, 1.0).powu(m as u32);
        let eps = |m: usize| if m == 0 { 1.0 } else { 2.0 };
        if r >= self.a {
            let h = hankel1_seq(mmax, self.k * r);
            let scat: Complex64 = (0..=mmax).map(|m| eps(m) * i_pow(m) * self.coeffs[m] * h[m] * (m as f64 * phi).cos()).sum();
            let inc = Complex64::from_polar(1.0, self.k * r * phi.cos());
            return Ok(inc + scat);
        }
        match &self.kind {
            SeriesKind::SoundSoft => Err(OracleError::InvalidParameter("point inside the sound-soft disk".into())),
            SeriesKind::Penetrable { n0 } => {
                let jv = bessel_j_seq(mmax, self.k * n0 * r);
                Ok((0..=mmax).map(|m| eps(m) * i_pow(m) * self.interior[m].c * jv[m] * (m as f64 * phi).cos()).sum())
            }
            SeriesKind::SmoothRadial { n0, core, profile } => {
                let kappa = self.k * n0;
                let jv = bessel_j_seq(mmax, kappa * r.min(*core));
                Ok((0..=mmax)
                    .map(|m| {
                        let inner = self.interior[m];
                        if inner.start == 0.0 {
                            return Complex64::new(0.0, 0.0);
                        }
                        let u = if r <= *core {
                            jv[m]
                        } else {
                            let steps = ((RADIAL_STEPS as f64) * (r - core) / (self.a - core)).ceil().max(1.0) as usize;
                            let jc = bessel_j_seq(m + 1, kappa * core);
                            let djc = derivative_seq(&jc);
                            integrate_radial(self.k, m, profile, *core, r, jc[m], kappa * djc[m], steps).0
                        };
                        eps(m) * i_pow(m) * inner.c * u * (m as f64 * phi).cos()
                    })
                    .sum())
            }
        }
    }
}

/// Far field of `sol` at `directions`.
pub fn mie_far_field(sol: &SeriesSolution, directions: &[Point]) -> Vec<Complex64> {
    sol.far_field(directions)
}

/// Total field of `sol` at `points`.
pub fn mie_near_field(sol: &SeriesSolution, points: &[Point]) -> Result<Vec<Complex64>, OracleError> {
    sol.near_field(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::cutoff;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::TAU;

    fn dirs(n: usize) -> Vec<Point> {
        (0..n).map(|j| {
            let t = TAU * j as f64 / n as f64;
            [t.cos(), t.sin()]
        })
        .collect()
    }

    #[test]
    fn low_frequency_is_nearly_isotropic() {
        let s = SeriesSolution::new(SeriesKind::SoundSoft, 1e-4, 1.0, 0.0).unwrap();
        let f = s.far_field(&dirs(1000));
        let max = f.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let min = f.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        assert!(max / min <= 1.0 + 1e-2);
        let s2 = SeriesSolution::with_truncation(SeriesKind::SoundSoft, 1e-4, 1.0, 0.0, s.modes() + 5).unwrap();
        let f2 = s2.far_field(&dirs(1000));
        assert!(f.iter().zip(&f2).all(|(a, b)| (a - b).norm() <= 1e-14 * a.norm()));
    }

    #[test]
    fn no_contrast_no_scattering() {
        let s = SeriesSolution::new(SeriesKind::Penetrable { n0: 1.0 }, PI, 1.0, 0.3).unwrap();
        assert!(s.far_field(&dirs(100)).iter().all(|z| z.norm() < 1e-14));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let p = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            let u = s.near_field(&[p]).unwrap()[0];
            let inc = Complex64::from_polar(1.0, PI * (0.3f64.cos() * p[0] + 0.3f64.sin() * p[1]));
            assert!((u - inc).norm() < 1e-12, "{p:?}");
        }
    }

    fn optical_theorem(s: &SeriesSolution) {
        let n = 1000;
        let f = s.far_field(&dirs(n));
        let sigma: f64 = f.iter().map(|z| z.norm_sqr()).sum::<f64>() * TAU / n as f64;
        let forward = s.far_field(&[[s.angle.cos(), s.angle.sin()]])[0];
        let rhs = -(8.0 * PI / s.k).sqrt() * (Complex64::from_polar(1.0, FRAC_PI_4) * forward).re;
        assert!((sigma - rhs).abs() < 1e-10 * sigma, "{sigma} {rhs}");
    }

    #[test]
    fn optical_theorem_holds() {
        optical_theorem(&SeriesSolution::new(SeriesKind::SoundSoft, PI, 1.0, 0.0).unwrap());
        optical_theorem(&SeriesSolution::new(SeriesKind::Penetrable { n0: 2.0 }, PI, 1.0, 0.7).unwrap());
    }

    #[test]
    fn sound_soft_boundary_condition() {
        let s = SeriesSolution::new(SeriesKind::SoundSoft, PI, 1.0, 0.0).unwrap();
        for j in 0..16 {
            let t = TAU * j as f64 / 16.0;
            assert!(s.near_field(&[[t.cos(), t.sin()]]).unwrap()[0].norm() < 1e-10);
        }
    }

    #[test]
    fn penetrable_continuity_and_truncation_stability() {
        let kind = SeriesKind::Penetrable { n0: 2.0 };
        let s = SeriesSolution::new(kind.clone(), PI, 1.0, 0.2).unwrap();
        let s10 = SeriesSolution::with_truncation(kind, PI, 1.0, 0.2, s.modes() + 10).unwrap();
        for j in 0..12 {
            let t = TAU * j as f64 / 12.0 + 0.1;
            let (pi, po) = ([(1.0 - 1e-12) * t.cos(), (1.0 - 1e-12) * t.sin()], [t.cos(), t.sin()]);
            let (ui, uo) = (s.near_field(&[pi]).unwrap()[0], s.near_field(&[po]).unwrap()[0]);
            assert!((ui - uo).norm() < 1e-10, "{ui} {uo}");
            let q = [1.7 * t.cos(), 1.7 * t.sin()];
            assert!((s.near_field(&[q]).unwrap()[0] - s10.near_field(&[q]).unwrap()[0]).norm() < 1e-12);
        }
    }

    #[test]
    fn large_index_approaches_sound_soft() {
        let soft = SeriesSolution::new(SeriesKind::SoundSoft, PI, 1.0, 0.0).unwrap();
        let hard = SeriesSolution::new(SeriesKind::Penetrable { n0: 1e6 }, PI, 1.0, 0.0).unwrap();
        let d = dirs(200);
        let (a, b) = (soft.far_field(&d), hard.far_field(&d));
        let diff = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(diff <= 1e-3, "{diff}");
    }

    fn smooth_kind(n0: f64, core: f64, a: f64) -> SeriesKind {
        SeriesKind::SmoothRadial {
            n0,
            core,
            profile: Arc::new(move |r| 1.0 + (n0 * n0 - 1.0) * cutoff((r - core) / (a - core))),
        }
    }

    #[test]
    fn smooth_profile_converges_in_step_count() {
        let a = SeriesSolution::with_radial_steps(smooth_kind(2.0, 0.5, 1.0), PI, 1.0, 0.0, 1000).unwrap();
        let b = SeriesSolution::with_radial_steps(smooth_kind(2.0, 0.5, 1.0), PI, 1.0, 0.0, 4000).unwrap();
        let d = dirs(64);
        let (fa, fb) = (a.far_field(&d), b.far_field(&d));
        let scale = fb.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let diff = fa.iter().zip(&fb).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-10 * scale, "{diff}");
        optical_theorem(&b);
    }

    #[test]
    fn smooth_profile_with_step_equals_constant_disk() {
        // a profile equal to n0² everywhere inside reduces to the constant disk
        let kind = SeriesKind::SmoothRadial { n0: 2.0, core: 0.5, profile: Arc::new(|_| 4.0) };
        let s = SeriesSolution::new(kind, PI, 1.0, 0.0).unwrap();
        let c = SeriesSolution::new(SeriesKind::Penetrable { n0: 2.0 }, PI, 1.0, 0.0).unwrap();
        let d = dirs(32);
        for (x, y) in s.far_field(&d).iter().zip(c.far_field(&d)) {
            assert!((x - y).norm() < 1e-10);
        }
        // continuity of the smooth solution across r = a and r = core
        let u = s.near_field(&[[0.999_999_999, 0.0], [1.0, 0.0], [0.3, 0.2]]).unwrap();
        assert!((u[0] - u[1]).norm() < 1e-7);
        let uc = c.near_field(&[[0.3, 0.2]]).unwrap()[0];
        assert!((u[2] - uc).norm() < 1e-9);
    }

    #[test]
    fn invalid_parameters() {
        assert!(SeriesSolution::new(SeriesKind::SoundSoft, -1.0, 1.0, 0.0).is_err());
        assert!(SeriesSolution::new(SeriesKind::Penetrable { n0: 0.0 }, 1.0, 1.0, 0.0).is_err());
        assert!(matches!(
            SeriesSolution::new(SeriesKind::SoundSoft, 500.0, 1.0, 0.0),
            Err(OracleError::NonConvergent(_))
        ));
    }
}

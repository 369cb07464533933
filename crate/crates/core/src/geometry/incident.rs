use num_complex::Complex64;

use super::{GeometryError, Point};

/// Plane wave `u(x) = a·exp(i k d·x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IncidentWave {
    pub k: f64,
    pub direction: Point,
    pub amplitude: Complex64,
}

impl IncidentWave {
    pub fn new(k: f64, direction: Point) -> Result<Self, GeometryError> {
        Self::with_amplitude(k, direction, Complex64::new(1.0, 0.0))
    }

    pub fn with_amplitude(k: f64, direction: Point, amplitude: Complex64) -> Result<Self, GeometryError> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(GeometryError::InvalidWave(format!("wavenumber must be positive, got {k}")));
        }
        let norm = direction[0].hypot(direction[1]);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(GeometryError::InvalidWave(format!("direction has length {norm}, expected 1")));
        }
        if !(amplitude.re.is_finite() && amplitude.im.is_finite()) {
            return Err(GeometryError::InvalidWave("amplitude is not finite".into()));
        }
        Ok(Self { k, direction, amplitude })
    }

    /// Direction `(cos α, sin α)`.
    pub fn from_angle(k: f64, angle: f64) -> Result<Self, GeometryError> {
        Self::new(k, [angle.cos(), angle.sin()])
    }

    pub fn eval(&self, p: Point) -> Complex64 {
        let phase = self.k * (self.direction[0] * p[0] + self.direction[1] * p[1]);
        self.amplitude * Complex64::from_polar(1.0, phase)
    }

    pub fn gradient(&self, p: Point) -> [Complex64; 2] {
        let u = self.eval(p) * Complex64::new(0.0, self.k);
        [u * self.direction[0], u * self.direction[1]]
    }

    pub fn eval_many(&self, points: &[Point]) -> Vec<Complex64> {
        points.iter().map(|&p| self.eval(p)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == Complex64::new(0.0, 0.0)
    }
}

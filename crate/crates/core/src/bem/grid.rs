use std::f64::consts::PI;

use crate::geometry::{CurveSample, Point, SmoothCurve};

use super::BemError;

/// Uniform Nyström grid `t_j = πj/N`, `j = 0..2N`, with cached curve data.
#[derive(Clone, Debug)]
pub struct NystromGrid {
    curve: SmoothCurve,
    n: usize,
    params: Vec<f64>,
    samples: Vec<CurveSample>,
}

impl NystromGrid {
    pub fn new(curve: SmoothCurve, n: usize) -> Result<Self, BemError> {
        if n == 0 {
            return Err(BemError::InvalidN(n));
        }
        let params: Vec<f64> = (0..2 * n).map(|j| PI * j as f64 / n as f64).collect();
        let samples = params.iter().map(|&t| curve.eval(t)).collect::<Result<Vec<_>, _>>()?;
        for (s, &t) in samples.iter().zip(&params) {
            if !(s.speed() > 0.0) {
                return Err(crate::geometry::GeometryError::IrregularCurve { t }.into());
            }
        }
        Ok(Self { curve, n, params, samples })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of nodes, `2N`.
    pub fn len(&self) -> usize {
        2 * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn curve(&self) -> &SmoothCurve {
        &self.curve
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn samples(&self) -> &[CurveSample] {
        &self.samples
    }

    pub fn points(&self) -> Vec<Point> {
        self.samples.iter().map(|s| s.point).collect()
    }

    /// Trapezoidal weight `π/N`.
    pub fn spacing(&self) -> f64 {
        PI / self.n as f64
    }

    pub fn max_speed(&self) -> f64 {
        self.samples.iter().map(CurveSample::speed).fold(0.0, f64::max)
    }
}

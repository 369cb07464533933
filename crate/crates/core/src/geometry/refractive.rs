use std::f64::consts::{E, TAU};
use std::fmt;
use std::sync::Arc;

use super::curve::{point_in_polygon, polygon_distance};
use super::Point;

/// Tolerance on a level-set indicator below which a point counts as lying on
/// the heterogeneity boundary.
pub const LEVEL_SET_TOL: f64 = 1e-12;

/// Smooth cut-off: 1 for `x ≤ 0`, `exp(1/(e − e^{1/x}))` on `(0, 1)`, 0 for `x ≥ 1`.
pub fn cutoff_tilde(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x >= 1.0 {
        0.0
    } else {
        let inv = 1.0 / x;
        // e^{1/x} overflows for tiny x; the limit there is exp(0-) = 1
        if inv > 700.0 {
            return 1.0;
        }
        (1.0 / (E - inv.exp())).exp()
    }
}

/// Symmetrised cut-off `χ(x) = ½(χ̃(x) + 1 − χ̃(1−x))`, with `χ(1−x) = 1 − χ(x)`.
pub fn cutoff(x: f64) -> f64 {
    0.5 * (cutoff_tilde(x) + 1.0 - cutoff_tilde(1.0 - x))
}

/// Where `n ≠ 1` may hold.
#[derive(Clone)]
pub enum Support {
    /// No heterogeneity.
    Empty,
    /// Closed polygon, counter-clockwise.
    Polygon(Vec<Point>),
    /// `indicator(p) < 0` inside; `boundary(θ)` samples the zero set for
    /// `θ ∈ [0, 2π)`.
    LevelSet {
        indicator: Arc<dyn Fn(Point) -> f64 + Send + Sync>,
        boundary: Arc<dyn Fn(f64) -> Point + Send + Sync>,
    },
}

impl fmt::Debug for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => write!(f, "Empty"),
            Self::Polygon(p) => f.debug_tuple("Polygon").field(&p.len()).finish(),
            Self::LevelSet { .. } => write!(f, "LevelSet"),
        }
    }
}

impl Support {
    /// Strictly-inside test (boundary points within tolerance are excluded).
    pub fn contains(&self, p: Point) -> bool {
        match self {
            Self::Empty => false,
            Self::Polygon(poly) => point_in_polygon(p, poly) && polygon_distance(p, poly) > LEVEL_SET_TOL,
            Self::LevelSet { indicator, .. } => indicator(p) < -LEVEL_SET_TOL,
        }
    }

    /// Strictly-outside test.
    pub fn excludes(&self, p: Point) -> bool {
        match self {
            Self::Empty => true,
            Self::Polygon(poly) => !point_in_polygon(p, poly) && polygon_distance(p, poly) > LEVEL_SET_TOL,
            Self::LevelSet { indicator, .. } => indicator(p) > LEVEL_SET_TOL,
        }
    }

    /// Points on the boundary of the support, roughly `n` of them.
    pub fn boundary_samples(&self, n: usize) -> Vec<Point> {
        match self {
            Self::Empty => Vec::new(),
            Self::Polygon(poly) => {
                let per_edge = (n / poly.len().max(1)).max(1);
                let mut out = Vec::with_capacity(per_edge * poly.len());
                for i in 0..poly.len() {
                    let a = poly[i];
                    let b = poly[(i + 1) % poly.len()];
                    for s in 0..per_edge {
                        let t = s as f64 / per_edge as f64;
                        out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
                    }
                }
                out
            }
            Self::LevelSet { boundary, .. } => {
                (0..n).map(|j| boundary(TAU * j as f64 / n as f64)).collect()
            }
        }
    }

    pub fn is_polygonal(&self) -> bool {
        matches!(self, Self::Polygon(_))
    }
}

/// The squared refractive index `n²(x, y)`, equal to 1 outside its support.
#[derive(Clone, Debug)]
pub enum RefractiveField {
    /// `n ≡ 1`.
    Uniform,
    /// Five-pointed star: `n² = 1 + 16 χ((r/(2 + 0.75 sin 5θ) − 0.025)/0.975)`.
    Star,
    /// Polygonal support with `n² = 5 + 4 χ((r/(2 − 0.75 cos 4θ) − 0.025)/0.9)`
    /// inside, polar coordinates taken about `(−0.18, −0.6)`.
    Pikachu { polygon: Vec<Point> },
    /// `n = n0` inside the disk, 1 outside (discontinuous).
    ConstantDisk { center: Point, radius: f64, n0: f64 },
    /// `n² = 1 + (n0² − 1) χ((r − core)/(radius − core))`: constant `n0` for
    /// `r ≤ core`, smooth transition to 1 at `r = radius`.
    SmoothDisk { center: Point, radius: f64, core_radius: f64, n0: f64 },
}

fn star_radius(theta: f64) -> f64 {
    2.0 + 0.75 * (5.0 * theta).sin()
}

const PIKACHU_CENTER: Point = [-0.18, -0.6];

impl RefractiveField {
    /// The stand-in polygon shipped for the `Pikachu` preset. Its vertices sit
    /// on a lattice of spacing 0.5 and its slanted edges follow the `(1, 1)`
    /// direction, so structured meshes with that diagonal resolve it exactly.
    /// It is not the polygon behind any published result.
    pub fn pikachu_standin() -> Self {
        let polygon = vec![
            [-1.5, -2.5],
            [1.5, -2.5],
            [1.5, 0.5],
            [2.5, 1.5],
            [2.5, 3.0],
            [2.0, 3.0],
            [1.0, 2.0],
            [-1.0, 2.0],
            [-1.0, 3.0],
            [-1.5, 3.0],
            [-2.5, 2.0],
            [-2.5, 1.0],
            [-1.5, 1.0],
        ];
        Self::Pikachu { polygon }
    }

    pub fn n_squared(&self, p: Point) -> f64 {
        match self {
            Self::Uniform => 1.0,
            Self::Star => {
                let r = p[0].hypot(p[1]);
                let theta = p[1].atan2(p[0]);
                1.0 + 16.0 * cutoff((r / star_radius(theta) - 0.025) / 0.975)
            }
            Self::Pikachu { polygon } => {
                if !point_in_polygon(p, polygon) {
                    return 1.0;
                }
                let dx = p[0] - PIKACHU_CENTER[0];
                let dy = p[1] - PIKACHU_CENTER[1];
                let r = dx.hypot(dy);
                let theta = dy.atan2(dx);
                5.0 + 4.0 * cutoff((r / (2.0 - 0.75 * (4.0 * theta).cos()) - 0.025) / 0.9)
            }
            Self::ConstantDisk { center, radius, n0 } => {
                if (p[0] - center[0]).hypot(p[1] - center[1]) < *radius {
                    n0 * n0
                } else {
                    1.0
                }
            }
            Self::SmoothDisk { center, radius, core_radius, n0 } => {
                let r = (p[0] - center[0]).hypot(p[1] - center[1]);
                1.0 + (n0 * n0 - 1.0) * cutoff((r - core_radius) / (radius - core_radius))
            }
        }
    }

    /// Radial profile `n²(r)` for the rotationally symmetric presets.
    pub fn radial_profile(&self) -> Option<(Point, f64, Arc<dyn Fn(f64) -> f64 + Send + Sync>)> {
        match *self {
            Self::Uniform => Some(([0.0, 0.0], 0.0, Arc::new(|_| 1.0))),
            Self::ConstantDisk { center, radius, n0 } => {
                Some((center, radius, Arc::new(move |r| if r < radius { n0 * n0 } else { 1.0 })))
            }
            Self::SmoothDisk { center, radius, core_radius, n0 } => Some((
                center,
                radius,
                Arc::new(move |r| 1.0 + (n0 * n0 - 1.0) * cutoff((r - core_radius) / (radius - core_radius))),
            )),
            _ => None,
        }
    }

    pub fn support(&self) -> Support {
        match self {
            Self::Uniform => Support::Empty,
            Self::Star => Support::LevelSet {
                indicator: Arc::new(|p: Point| {
                    let r = p[0].hypot(p[1]);
                    r - star_radius(p[1].atan2(p[0]))
                }),
                boundary: Arc::new(|theta| {
                    let r = star_radius(theta);
                    [r * theta.cos(), r * theta.sin()]
                }),
            },
            Self::Pikachu { polygon } => Support::Polygon(polygon.clone()),
            Self::ConstantDisk { center, radius, .. } | Self::SmoothDisk { center, radius, .. } => {
                let (c, r) = (*center, *radius);
                Support::LevelSet {
                    indicator: Arc::new(move |p: Point| (p[0] - c[0]).hypot(p[1] - c[1]) - r),
                    boundary: Arc::new(move |theta| [c[0] + r * theta.cos(), c[1] + r * theta.sin()]),
                }
            }
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, Self::Uniform)
    }
}

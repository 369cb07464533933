//! Run configuration read from a TOML file. Unknown keys are rejected.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use fembem::geometry::{
    build_structured_mesh, load_mesh, validate_nesting, IncidentWave, NestingReport, Rect, RefractiveField,
    SmoothCurve, TriMesh,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub medium: MediumConfig,
    pub wave: WaveConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    /// Ω₂ as `[x0, x1, y0, y1]`.
    #[serde(default = "default_rectangle")]
    pub rectangle: [f64; 4],
    /// Base cells `[nx, ny]` before refinement.
    #[serde(default = "default_cells")]
    pub cells: [usize; 2],
    #[serde(default)]
    pub level: usize,
    #[serde(default = "default_degree")]
    pub degree: usize,
    /// Base path of a `.node`/`.ele` pair used instead of the structured mesh.
    #[serde(default)]
    pub mesh: Option<PathBuf>,
    pub curve: CurveConfig,
}

fn default_rectangle() -> [f64; 4] {
    [-6.0, 6.0, -8.0, 8.0]
}

fn default_cells() -> [usize; 2] {
    [12, 16]
}

fn default_degree() -> usize {
    2
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CurveConfig {
    Circle {
        radius: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    Ellipse {
        semi_axes: [f64; 2],
        #[serde(default)]
        center: [f64; 2],
    },
    RoundedSquare {
        #[serde(default)]
        scale: Option<f64>,
    },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MediumConfig {
    Uniform {},
    Star {},
    Pikachu {},
    ConstantDisk {
        #[serde(default)]
        center: [f64; 2],
        radius: f64,
        n0: f64,
    },
    SmoothDisk {
        #[serde(default)]
        center: [f64; 2],
        radius: f64,
        core_radius: f64,
        n0: f64,
    },
}

impl Default for MediumConfig {
    fn default() -> Self {
        Self::Uniform {}
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct WaveConfig {
    pub k: f64,
    /// Incident angle in radians; mutually exclusive with `direction`.
    #[serde(default)]
    pub angle: Option<f64>,
    #[serde(default)]
    pub direction: Option<[f64; 2]>,
    /// Complex amplitude `[re, im]`.
    #[serde(default = "default_amplitude")]
    pub amplitude: [f64; 2],
}

fn default_amplitude() -> [f64; 2] {
    [1.0, 0.0]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Gmres,
    Direct,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Γ carries `2N` Nyström nodes.
    #[serde(default = "default_n")]
    pub n: usize,
}

fn default_method() -> Method {
    Method::Gmres
}

fn default_tol() -> f64 {
    1e-8
}

fn default_n() -> usize {
    64
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { method: default_method(), tol: default_tol(), n: default_n() }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_angles")]
    pub far_field_angles: usize,
    /// Interior raster resolution `[nx, ny]`; omitted means no raster.
    #[serde(default)]
    pub raster: Option<[usize; 2]>,
    /// Random overlap samples for the consistency report; 0 disables it.
    #[serde(default)]
    pub overlap_samples: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

fn default_angles() -> usize {
    1000
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            far_field_angles: default_angles(),
            raster: None,
            overlap_samples: 0,
            seed: 0,
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        let cfg: Self = toml::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        cfg.check()?;
        Ok(cfg)
    }

    /// Checks ranges that the type system does not.
    pub fn check(&self) -> Result<(), CliError> {
        let g = &self.geometry;
        let [x0, x1, y0, y1] = g.rectangle;
        if !(x1 > x0 && y1 > y0) {
            return Err(invalid(format!("rectangle {:?} is empty", g.rectangle)));
        }
        if !(1..=4).contains(&g.degree) {
            return Err(invalid(format!("degree must be 1..=4, got {}", g.degree)));
        }
        if g.cells[0] == 0 || g.cells[1] == 0 {
            return Err(invalid("cells must be positive"));
        }
        if !(self.wave.k > 0.0 && self.wave.k.is_finite()) {
            return Err(invalid(format!("k must be positive, got {}", self.wave.k)));
        }
        if self.wave.angle.is_some() && self.wave.direction.is_some() {
            return Err(invalid("give either wave.angle or wave.direction, not both"));
        }
        if !(self.solver.tol > 0.0) {
            return Err(invalid(format!("solver.tol must be positive, got {}", self.solver.tol)));
        }
        if self.solver.n == 0 {
            return Err(invalid("solver.n must be positive"));
        }
        if self.output.far_field_angles == 0 {
            return Err(invalid("output.far_field_angles must be positive"));
        }
        match self.medium {
            MediumConfig::ConstantDisk { radius, n0, .. } if !(radius > 0.0 && n0 > 0.0) => {
                return Err(invalid("constant-disk needs radius > 0 and n0 > 0"))
            }
            MediumConfig::SmoothDisk { radius, core_radius, n0, .. }
                if !(radius > 0.0 && core_radius > 0.0 && core_radius < radius && n0 > 0.0) =>
            {
                return Err(invalid("smooth-disk needs 0 < core_radius < radius and n0 > 0"))
            }
            _ => {}
        }
        Ok(())
    }

    pub fn curve(&self) -> SmoothCurve {
        match self.geometry.curve {
            CurveConfig::Circle { radius, center } => SmoothCurve::Circle { center, radius },
            CurveConfig::Ellipse { semi_axes, center } => SmoothCurve::Ellipse { center, semi_axes },
            CurveConfig::RoundedSquare { scale: None } => SmoothCurve::rounded_square(),
            CurveConfig::RoundedSquare { scale: Some(scale) } => SmoothCurve::RoundedSquare { scale },
        }
    }

    pub fn field(&self) -> RefractiveField {
        match self.medium {
            MediumConfig::Uniform {} => RefractiveField::Uniform,
            MediumConfig::Star {} => RefractiveField::Star,
            MediumConfig::Pikachu {} => RefractiveField::pikachu_standin(),
            MediumConfig::ConstantDisk { center, radius, n0 } => RefractiveField::ConstantDisk { center, radius, n0 },
            MediumConfig::SmoothDisk { center, radius, core_radius, n0 } => {
                RefractiveField::SmoothDisk { center, radius, core_radius, n0 }
            }
        }
    }

    pub fn incident_angle(&self) -> f64 {
        match (self.wave.angle, self.wave.direction) {
            (_, Some(d)) => d[1].atan2(d[0]),
            (Some(a), None) => a,
            (None, None) => 0.0,
        }
    }

    pub fn wave(&self) -> Result<IncidentWave, CliError> {
        let amp = Complex64::new(self.wave.amplitude[0], self.wave.amplitude[1]);
        let dir = match self.wave.direction {
            Some(d) => d,
            None => {
                let a = self.incident_angle();
                [a.cos(), a.sin()]
            }
        };
        IncidentWave::with_amplitude(self.wave.k, dir, amp).map_err(|e| invalid(e.to_string()))
    }

    /// Mesh at the configured level, or at `level` when given.
    pub fn mesh(&self, level: Option<usize>) -> Result<TriMesh, CliError> {
        let g = &self.geometry;
        let level = level.unwrap_or(g.level);
        let field = self.field();
        match &g.mesh {
            Some(base) => {
                let mut mesh = load_mesh(base, g.degree).map_err(|e| invalid(e.to_string()))?;
                for _ in 0..level {
                    mesh = mesh.refine().map_err(|e| invalid(e.to_string()))?;
                }
                let report = mesh.alignment(&field);
                if report.polygonal && !report.is_aligned() {
                    return Err(invalid(format!("{} triangles straddle the polygonal medium", report.straddling.len())));
                }
                Ok(mesh)
            }
            None => {
                let [x0, x1, y0, y1] = g.rectangle;
                build_structured_mesh(Rect::new(x0, x1, y0, y1), g.cells, level, g.degree, &field)
                    .map(|(m, _)| m)
                    .map_err(|e| invalid(e.to_string()))
            }
        }
    }

    /// Builds the mesh and checks the nesting of the medium, Γ and Σ.
    pub fn validate(&self, level: Option<usize>) -> Result<(Arc<TriMesh>, NestingReport), CliError> {
        self.curve().validate(2048).map_err(|e| invalid(e.to_string()))?;
        let mesh = self.mesh(level)?;
        let report = validate_nesting(&self.curve(), &mesh, &self.field()).map_err(|e| invalid(e.to_string()))?;
        Ok((Arc::new(mesh), report))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[geometry]
curve = { kind = "circle", radius = 3.5 }

[wave]
k = 0.7853981633974483
"#;

    #[test]
    fn defaults_follow_the_reference_setup() {
        let cfg: RunConfig = toml::from_str(MINIMAL).unwrap();
        cfg.check().unwrap();
        assert_eq!(cfg.geometry.rectangle, [-6.0, 6.0, -8.0, 8.0]);
        assert_eq!(cfg.solver.tol, 1e-8);
        assert_eq!(cfg.output.far_field_angles, 1000);
        assert!(matches!(cfg.medium, MediumConfig::Uniform {}));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{MINIMAL}\nextra = 1\n");
        assert!(toml::from_str::<RunConfig>(&text).is_err());
        let text = MINIMAL.replace("radius = 3.5", "radius = 3.5, sides = 4");
        assert!(toml::from_str::<RunConfig>(&text).is_err());
        let text = format!("{MINIMAL}\n[medium]\npreset = \"star\"\nn0 = 2.0\n");
        assert!(toml::from_str::<RunConfig>(&text).is_err());
    }

    #[test]
    fn ranges_are_checked() {
        let mut cfg: RunConfig = toml::from_str(MINIMAL).unwrap();
        cfg.geometry.degree = 7;
        assert!(cfg.check().is_err());
        cfg.geometry.degree = 2;
        cfg.wave.k = -1.0;
        assert!(cfg.check().is_err());
        cfg.wave.k = 1.0;
        cfg.wave.direction = Some([1.0, 0.0]);
        cfg.wave.angle = Some(0.0);
        assert!(cfg.check().is_err());
    }

    #[test]
    fn presets_build_media() {
        let text = format!("{MINIMAL}\n[medium]\npreset = \"smooth-disk\"\nradius = 1.0\ncore_radius = 0.5\nn0 = 2.0\n");
        let cfg: RunConfig = toml::from_str(&text).unwrap();
        assert!(matches!(cfg.field(), RefractiveField::SmoothDisk { .. }));
        let (_, report) = cfg.validate(None).unwrap();
        assert!(report.gamma_to_sigma > 2.0);
    }
}

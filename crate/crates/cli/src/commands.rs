use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use fembem::bem::{directions_from_angles, far_field_csv, uniform_angles};
use fembem::coupling::{overlap_consistency, reconstruct, solve_interface, CoupledProblem, CouplingError, SolveMethod};
use fembem::fem::RasterGrid;
use fembem::geometry::{Point, Rect, RefractiveField};
use fembem::oracles::{convergence_study, OracleError, RunOutcome, SeriesKind, SeriesSolution, Truth};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::{Method, RunConfig};
use crate::CliError;

/// Command-line overrides of the `[solver]` and `[output]` sections.
#[derive(Clone, Debug, Default)]
pub struct SolveOverrides {
    pub method: Option<Method>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub force: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub assemble_seconds: f64,
    pub setup_seconds: f64,
    pub solve_seconds: f64,
    pub total_seconds: f64,
}

/// Record written to `summary.json`.
#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub method: String,
    pub level: usize,
    pub degree: usize,
    pub k: f64,
    /// Free FEM nodes.
    #[serde(rename = "L")]
    pub l: usize,
    /// Σ nodes.
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub iterations: usize,
    pub residual: f64,
    pub gamma_to_sigma: f64,
    pub heterogeneity_to_gamma: Option<f64>,
    pub overlap_defect: Option<f64>,
    pub timings: Timings,
}

fn solver_error(e: impl std::fmt::Display) -> CliError {
    CliError::Solver(e.to_string())
}

fn coupling_error(e: CouplingError) -> CliError {
    match e {
        CouplingError::Geometry(g) => CliError::Config(g.to_string()),
        CouplingError::InvalidTolerance(_) | CouplingError::WavenumberMismatch { .. } => CliError::Config(e.to_string()),
        other => CliError::Solver(other.to_string()),
    }
}

/// Creates `dir` and refuses to replace any of `files` unless `force` is set.
fn prepare_output(dir: &Path, files: &[&str], force: bool) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("cannot create {}: {e}", dir.display())))?;
    if !force {
        if let Some(f) = files.iter().map(|f| dir.join(f)).find(|p| p.exists()) {
            return Err(CliError::Config(format!("{} exists; pass --force to overwrite", f.display())));
        }
    }
    Ok(())
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))
}

/// Builds and checks the problem described by `cfg` at `level` and `n`.
fn build_problem(cfg: &RunConfig, level: Option<usize>, n: usize) -> Result<CoupledProblem, CliError> {
    let (mesh, _) = cfg.validate(level)?;
    let wave = cfg.wave()?;
    CoupledProblem::assemble(mesh, &cfg.field(), cfg.curve(), n, wave).map_err(coupling_error)
}

/// Solves once and writes `farfield.csv`, `solver_log.txt`, `summary.json`
/// and, when configured, `raster.csv` and `overlap.json`.
pub fn run_solve(cfg: &RunConfig, overrides: &SolveOverrides) -> Result<Summary, CliError> {
    let start = Instant::now();
    let mut cfg = cfg.clone();
    if let Some(m) = overrides.method {
        cfg.solver.method = m;
    }
    if let Some(t) = overrides.tol {
        cfg.solver.tol = t;
    }
    if let Some(o) = &overrides.out {
        cfg.output.directory = o.clone();
    }
    cfg.check()?;
    let dir = cfg.output.directory.clone();
    let mut files = vec!["farfield.csv", "solver_log.txt", "summary.json"];
    if cfg.output.raster.is_some() {
        files.push("raster.csv");
    }
    if cfg.output.overlap_samples > 0 {
        files.push("overlap.json");
    }
    prepare_output(&dir, &files, overrides.force)?;

    let problem = build_problem(&cfg, None, cfg.solver.n)?;
    let assemble_seconds = start.elapsed().as_secs_f64();
    let method = match cfg.solver.method {
        Method::Gmres => SolveMethod::Gmres,
        Method::Direct => SolveMethod::Direct,
    };
    let state = solve_interface(&problem, method, cfg.solver.tol).map_err(coupling_error)?;
    let recon = reconstruct(&problem, &state).map_err(coupling_error)?;
    let angles = uniform_angles(cfg.output.far_field_angles);
    let far = recon.far_field(&problem, &directions_from_angles(&angles)).map_err(coupling_error)?;
    write(&dir, "farfield.csv", &far_field_csv(&angles, &far))?;
    write(&dir, "solver_log.txt", &format!("iter, residual\n{}", state.diagnostics.iteration_log()))?;

    if let Some([nx, ny]) = cfg.output.raster {
        let [x0, x1, y0, y1] = cfg.geometry.rectangle;
        let raster = recon.interior.eval_field_on_grid(&RasterGrid { rect: Rect::new(x0, x1, y0, y1), nx, ny });
        let mut s = String::from("x,y,re,im\n");
        for (p, v) in raster.grid.points().iter().zip(&raster.values) {
            match v {
                Some(z) => writeln!(s, "{:.17e},{:.17e},{:.17e},{:.17e}", p[0], p[1], z.re, z.im),
                None => writeln!(s, "{:.17e},{:.17e},,", p[0], p[1]),
            }
            .unwrap();
        }
        write(&dir, "raster.csv", &s)?;
    }
    let overlap_defect = if cfg.output.overlap_samples > 0 {
        let report = overlap_consistency(&problem, &recon, cfg.output.overlap_samples, cfg.output.seed).map_err(coupling_error)?;
        let json = serde_json::json!({
            "max_defect": report.max_defect,
            "samples": report.samples,
            "seed": cfg.output.seed,
            "excluded_band": report.exclusion,
        });
        write(&dir, "overlap.json", &serde_json::to_string_pretty(&json).unwrap())?;
        Some(report.max_defect)
    } else {
        None
    };

    let d = &state.diagnostics;
    let nest = problem.nesting();
    let summary = Summary {
        method: d.method.to_string(),
        level: cfg.geometry.level,
        degree: cfg.geometry.degree,
        k: problem.k(),
        l: problem.mesh().free_nodes().len(),
        m: problem.m(),
        n: cfg.solver.n,
        iterations: d.iterations,
        residual: d.final_residual,
        gamma_to_sigma: nest.gamma_to_sigma,
        heterogeneity_to_gamma: nest.hetero_to_gamma.is_finite().then_some(nest.hetero_to_gamma),
        overlap_defect,
        timings: Timings {
            assemble_seconds,
            setup_seconds: d.setup_seconds,
            solve_seconds: d.solve_seconds,
            total_seconds: start.elapsed().as_secs_f64(),
        },
    };
    write(&dir, "summary.json", &serde_json::to_string_pretty(&summary).unwrap())?;
    Ok(summary)
}

/// Series reference for rotationally symmetric media centred at the origin.
fn series_truth(cfg: &RunConfig, directions: &[Point]) -> Result<Option<Vec<Complex64>>, CliError> {
    let field = cfg.field();
    let kind = match field {
        RefractiveField::Uniform => return Ok(Some(vec![Complex64::new(0.0, 0.0); directions.len()])),
        RefractiveField::ConstantDisk { center: [0.0, 0.0], n0, .. } => SeriesKind::Penetrable { n0 },
        RefractiveField::SmoothDisk { center: [0.0, 0.0], core_radius, n0, .. } => {
            let (_, _, profile) = field.radial_profile().expect("disk media are radial");
            SeriesKind::SmoothRadial { n0, core: core_radius, profile }
        }
        _ => return Ok(None),
    };
    let radius = match field {
        RefractiveField::ConstantDisk { radius, .. } | RefractiveField::SmoothDisk { radius, .. } => radius,
        _ => unreachable!(),
    };
    let sol = SeriesSolution::new(kind, cfg.wave.k, radius, cfg.incident_angle()).map_err(solver_error)?;
    let amp = Complex64::new(cfg.wave.amplitude[0], cfg.wave.amplitude[1]);
    Ok(Some(sol.far_field(directions).into_iter().map(|z| z * amp).collect()))
}

/// Runs the configuration over `levels × ns` and writes `convergence.txt`
/// and `convergence.csv`. The truth is the series solution when one exists
/// and the next refinement otherwise.
pub fn run_convergence(
    cfg: &RunConfig,
    levels: &[usize],
    ns: &[usize],
    out: Option<&Path>,
    force: bool,
) -> Result<String, CliError> {
    cfg.check()?;
    if levels.is_empty() || ns.is_empty() || ns.contains(&0) {
        return Err(CliError::Config("need at least one level and positive N values".into()));
    }
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| cfg.output.directory.clone());
    prepare_output(&dir, &["convergence.txt", "convergence.csv"], force)?;
    let directions = directions_from_angles(&uniform_angles(cfg.output.far_field_angles));
    for &level in levels {
        cfg.validate(Some(level))?;
    }
    let truth = match series_truth(cfg, &directions)? {
        Some(v) => Truth::Exact(v),
        None => Truth::NextRefinement,
    };
    let method = match cfg.solver.method {
        Method::Gmres => SolveMethod::Gmres,
        Method::Direct => SolveMethod::Direct,
    };
    let run = |level: usize, n: usize| -> Result<RunOutcome, OracleError> {
        let wrap = |e: CliError| OracleError::Run(e.to_string());
        let problem = build_problem(cfg, Some(level), n).map_err(wrap)?;
        let state = solve_interface(&problem, method, cfg.solver.tol).map_err(|e| OracleError::Run(e.to_string()))?;
        let far = reconstruct(&problem, &state)
            .and_then(|r| r.far_field(&problem, &directions))
            .map_err(|e| OracleError::Run(e.to_string()))?;
        let iterations = (method == SolveMethod::Gmres).then_some(state.diagnostics.iterations);
        Ok(RunOutcome { far_field: far, iterations })
    };
    let table = convergence_study(run, levels, ns, &truth).map_err(solver_error)?;
    let text = table.to_text();
    write(&dir, "convergence.txt", &text)?;
    write(&dir, "convergence.csv", &table.to_csv())?;
    Ok(text)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OracleKind {
    SoundSoft,
    Penetrable,
    SmoothDisk,
}

#[derive(Clone, Debug)]
pub struct OracleArgs {
    pub kind: OracleKind,
    pub k: f64,
    pub radius: f64,
    pub n0: Option<f64>,
    pub core_radius: Option<f64>,
    pub angle: f64,
    pub angles: usize,
    pub out: PathBuf,
    pub force: bool,
}

/// Writes the series far field to `oracle_farfield.csv`.
pub fn run_oracle(args: &OracleArgs) -> Result<PathBuf, CliError> {
    let cfg_err = |m: &str| CliError::Config(m.into());
    let kind = match (args.kind, args.n0, args.core_radius) {
        (OracleKind::SoundSoft, None, None) => SeriesKind::SoundSoft,
        (OracleKind::SoundSoft, _, _) => return Err(cfg_err("sound-soft takes neither --n0 nor --core-radius")),
        (OracleKind::Penetrable, Some(n0), None) => SeriesKind::Penetrable { n0 },
        (OracleKind::Penetrable, None, _) => return Err(cfg_err("penetrable needs --n0")),
        (OracleKind::Penetrable, _, Some(_)) => return Err(cfg_err("penetrable takes no --core-radius")),
        (OracleKind::SmoothDisk, Some(n0), Some(core)) => {
            let field = RefractiveField::SmoothDisk { center: [0.0, 0.0], radius: args.radius, core_radius: core, n0 };
            let (_, _, profile) = field.radial_profile().expect("disk media are radial");
            SeriesKind::SmoothRadial { n0, core, profile }
        }
        (OracleKind::SmoothDisk, _, _) => return Err(cfg_err("smooth-disk needs --n0 and --core-radius")),
    };
    if args.angles == 0 {
        return Err(cfg_err("--angles must be positive"));
    }
    let sol = SeriesSolution::new(kind, args.k, args.radius, args.angle).map_err(|e| match e {
        OracleError::InvalidParameter(m) => CliError::Config(m),
        other => CliError::Solver(other.to_string()),
    })?;
    prepare_output(&args.out, &["oracle_farfield.csv"], args.force)?;
    let angles = uniform_angles(args.angles);
    let far = sol.far_field(&directions_from_angles(&angles));
    write(&args.out, "oracle_farfield.csv", &far_field_csv(&angles, &far))?;
    Ok(args.out.join("oracle_farfield.csv"))
}

/// Parses and checks the configuration without solving.
pub fn run_validate(cfg: &RunConfig) -> Result<String, CliError> {
    cfg.check()?;
    let (mesh, report) = cfg.validate(None)?;
    let mut s = String::new();
    writeln!(s, "mesh: {} triangles, degree {}, L = {}, M = {}", mesh.n_triangles(), mesh.degree(), mesh.free_nodes().len(), mesh.dirichlet_nodes().len()).unwrap();
    writeln!(s, "distance Γ to Σ: {:.6}", report.gamma_to_sigma).unwrap();
    if report.hetero_to_gamma.is_finite() {
        writeln!(s, "distance medium to Γ: {:.6}", report.hetero_to_gamma).unwrap();
    }
    Ok(s)
}

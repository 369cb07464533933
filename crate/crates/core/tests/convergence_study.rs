use std::f64::consts::PI;
use std::sync::Arc;

use fembem::bem::{directions_from_angles, uniform_angles};
use fembem::coupling::{reconstruct, solve_interface, CoupledProblem, SolveMethod};
use fembem::geometry::{build_structured_mesh, cutoff, IncidentWave, Point, Rect, RefractiveField, SmoothCurve};
use fembem::oracles::{convergence_study, OracleError, RunOutcome, SeriesKind, SeriesSolution, Truth};

const N0: f64 = 2.0;
const CORE: f64 = 0.5;
const K: f64 = PI;

fn field() -> RefractiveField {
    RefractiveField::SmoothDisk { center: [0.0, 0.0], radius: 1.0, core_radius: CORE, n0: N0 }
}

fn directions() -> Vec<Point> {
    directions_from_angles(&uniform_angles(1000))
}

fn series_truth() -> Vec<num_complex::Complex64> {
    let profile = Arc::new(|r: f64| 1.0 + (N0 * N0 - 1.0) * cutoff((r - CORE) / (1.0 - CORE)));
    SeriesSolution::new(SeriesKind::SmoothRadial { n0: N0, core: CORE, profile }, K, 1.0, 0.0).unwrap().far_field(&directions())
}

fn run(degree: usize, cells: usize, half: f64) -> impl FnMut(usize, usize) -> Result<RunOutcome, OracleError> {
    move |level, n| {
        let err = |e: fembem::coupling::CouplingError| OracleError::Run(e.to_string());
        let (mesh, _) = build_structured_mesh(Rect::new(-half, half, -half, half), [cells, cells], level, degree, &field())
            .map_err(|e| OracleError::Run(e.to_string()))?;
        let wave = IncidentWave::from_angle(K, 0.0).unwrap();
        let p = CoupledProblem::assemble(Arc::new(mesh), &field(), SmoothCurve::circle(1.6), n, wave).map_err(err)?;
        let s = solve_interface(&p, SolveMethod::Gmres, 1e-12).map_err(err)?;
        let far = reconstruct(&p, &s).map_err(err)?.far_field(&p, &directions()).map_err(err)?;
        Ok(RunOutcome { far_field: far, iterations: Some(s.diagnostics.iterations) })
    }
}

/// Least-squares slope of `log₂ error` against level.
fn fitted_order(errors: &[f64]) -> f64 {
    let n = errors.len() as f64;
    let xs: Vec<f64> = (0..errors.len()).map(|i| i as f64).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.log2()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    -num / den
}

#[test]
fn cubic_far_field_superconverges() {
    let table = convergence_study(run(3, 6, 2.0), &[1, 2, 3], &[64], &Truth::Exact(series_truth())).unwrap();
    println!("{}", table.to_text());
    let errors: Vec<f64> = table.rows.iter().map(|r| r.error).collect();
    let order = fitted_order(&errors);
    assert!((5.0..=7.0).contains(&order), "fitted order {order}");
    let iterations: Vec<_> = table.rows.iter().map(|r| r.iterations.unwrap()).collect();
    assert!(iterations.iter().max().unwrap() - iterations.iter().min().unwrap() <= 2, "{iterations:?}");
}

#[test]
fn columns_stagnate_once_n_outpaces_the_mesh() {
    let table = convergence_study(run(2, 4, 2.0), &[0], &[32, 48, 64], &Truth::Exact(series_truth())).unwrap();
    println!("{}", table.to_text());
    let errors: Vec<f64> = table.rows.iter().map(|r| r.error).collect();
    for w in errors.windows(2) {
        assert!((0.5..=2.0).contains(&(w[1] / w[0])), "{errors:?}");
    }
}

#[test]
fn self_refinement_truth_shrinks() {
    let table = convergence_study(run(2, 4, 2.0), &[1, 2], &[32], &Truth::NextRefinement).unwrap();
    assert_eq!(table.rows.len(), 2);
    assert!(table.rows[1].error < table.rows[0].error / 4.0, "{}", table.to_text());
    let csv = table.to_csv();
    assert_eq!(csv.lines().count(), 3);
}

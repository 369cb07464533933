use std::f64::consts::PI;
use std::sync::Arc;

use fembem::fem::{assemble, RasterGrid};
use fembem::geometry::{
    build_structured_mesh, load_mesh, save_mesh, validate_nesting, IncidentWave, Rect, RefractiveField, SmoothCurve,
};

#[test]
fn saved_mesh_reproduces_the_same_solution() {
    let field = RefractiveField::Star;
    let (mesh, report) = build_structured_mesh(Rect::new(-6.0, 6.0, -8.0, 8.0), [12, 16], 1, 2, &field).unwrap();
    assert!(!report.polygonal);
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("star");
    save_mesh(&mesh, &base).unwrap();
    let loaded = load_mesh(&base, 2).unwrap();
    assert_eq!(loaded.n_nodes(), mesh.n_nodes());
    assert_eq!(loaded.dirichlet_nodes().len(), mesh.dirichlet_nodes().len());

    let wave = IncidentWave::from_angle(PI / 4.0, 0.0).unwrap();
    let solve = |m| {
        let sys = assemble(Arc::new(m), PI / 4.0, &field).unwrap().factorize().unwrap();
        let data = wave.eval_many(&sys.mesh().dirichlet_points());
        sys.solve_dirichlet(&data).unwrap()
    };
    let (a, b) = (solve(mesh), solve(loaded));
    for p in [[0.3, 0.1], [-4.0, 5.0], [2.5, -7.0]] {
        assert!((a.eval(p).unwrap() - b.eval(p).unwrap()).norm() < 1e-12);
    }
    let raster = a.eval_field_on_grid(&RasterGrid { rect: Rect::new(-6.0, 6.0, -8.0, 8.0), nx: 12, ny: 16 });
    assert!(raster.values.iter().all(|v| v.is_some()));
}

#[test]
fn polygonal_medium_needs_an_aligned_mesh() {
    let field = RefractiveField::pikachu_standin();
    let (mesh, report) = build_structured_mesh(Rect::new(-8.0, 8.0, -8.0, 8.0), [32, 32], 0, 2, &field).unwrap();
    assert!(report.is_aligned());
    let nest = validate_nesting(&SmoothCurve::circle(5.0), &mesh, &field).unwrap();
    assert!(nest.gamma_to_sigma > 2.9 && nest.hetero_to_gamma > 0.0);
    assert!(build_structured_mesh(Rect::new(-8.0, 8.0, -8.0, 8.0), [24, 24], 0, 2, &field).is_err());
}

#[test]
fn experiment_layout_nests() {
    let field = RefractiveField::Star;
    let (mesh, _) = build_structured_mesh(Rect::new(-6.0, 6.0, -8.0, 8.0), [12, 16], 0, 1, &field).unwrap();
    let r = validate_nesting(&SmoothCurve::circle(3.5), &mesh, &field).unwrap();
    assert!((r.gamma_to_sigma - 2.5).abs() < 1e-6, "{r:?}");
    assert!(r.hetero_to_gamma > 0.7 && r.hetero_to_gamma < 0.8, "{r:?}");
}

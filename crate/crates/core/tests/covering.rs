use resokam_core::covering::{analytic_r2_bound, classify, estimate_measures, scan2d, ZoneCode};
use resokam_core::model::{build_model, covering_params, ModelSpec};

fn setup(eps: f64) -> (resokam_core::model::ConvexModel, resokam_core::model::CoveringParams) {
    let model = build_model(&ModelSpec::isotropic_unit_ball(2, 0.25)).unwrap();
    let params = covering_params(&model, eps, 12.0, 2.0).unwrap();
    (model, params)
}

#[test]
fn zones_partition_the_domain() {
    let (model, params) = setup(1e-24);
    let r = estimate_measures(&model, &params, 20_000, 3).unwrap();
    let total = r.fraction("R0") + r.fraction("R1") + r.fraction("R2") - r.fraction("R0&R1");
    assert!((total - 1.0).abs() < 1e-12, "{total}");
}

#[test]
fn measures_are_reproducible_per_seed() {
    let (model, params) = setup(1e-24);
    let a = estimate_measures(&model, &params, 10_000, 5).unwrap();
    let b = estimate_measures(&model, &params, 10_000, 5).unwrap();
    assert_eq!(a.fractions, b.fractions);
}

#[test]
fn residual_measure_stays_under_the_bound() {
    for eps in [1e-26, 1e-24, 1e-22] {
        let (model, params) = setup(eps);
        let r = estimate_measures(&model, &params, 20_000, 1).unwrap();
        let bound = analytic_r2_bound(&model, &params).unwrap().total;
        assert!(r.r2_measure <= bound + 3.0 * r.r2_measure_stderr, "eps = {eps}");
    }
}

#[test]
fn bound_scales_quadratically_in_alpha() {
    let (model, p1) = setup(1e-24);
    let p2 = covering_params(&model, 1e-24 / 4.0, 12.0, 2.0).unwrap();
    let b1 = analytic_r2_bound(&model, &p1).unwrap().total;
    let b2 = analytic_r2_bound(&model, &p2).unwrap().total;
    assert!((b1 / b2 - 4.0).abs() < 1e-9);
}

#[test]
fn points_on_a_resonance_line_are_resonant() {
    let (model, params) = setup(1e-24);
    // omega(y) = y, so y = (0, 0.5) is exactly resonant with k = (1, 0)
    let label = classify(&model, &params, &[0.0, 0.5]).unwrap();
    assert!(!label.in_r0);
    assert!(classify(&model, &params, &[2.0, 0.0]).is_err());
}

#[test]
fn scan_marks_points_outside_the_ball() {
    let (model, params) = setup(1e-22);
    let s = scan2d(&model, &params, (0, 1), 16).unwrap();
    assert_eq!(s.cells.len(), 256);
    let corner = s.cells.iter().find(|c| c.i == 0 && c.j == 0).unwrap();
    assert_eq!(corner.zone, ZoneCode::Outside);
    assert!(s.cells.iter().any(|c| c.zone == ZoneCode::R0));
}

use proptest::prelude::*;
use resokam_core::lattice::ResonanceVector;
use resokam_core::model::{build_model, covering_params, ModelSpec};
use resokam_core::resgraph::{
    build_graph, build_rotated, check_nonresonance, contraction_certificate, cube_decomposition, solve_eta,
    DEFAULT_GRID,
};

fn iso() -> resokam_core::model::ConvexModel {
    build_model(&ModelSpec::isotropic_unit_ball(2, 0.25)).unwrap()
}

#[test]
fn isotropic_graph_is_linear() {
    let rot = build_rotated(&iso(), &ResonanceVector::new(vec![1, 2]).unwrap()).unwrap();
    let g = build_graph(&rot, 5, 2).unwrap();
    assert!(!g.base_grid.is_empty());
    assert!(g.margins.residual >= 0.0);
    assert!(g.margins.inclusion >= 0.0);
    assert!((g.margins.max_eta_slope - g.margins.slope_bound).abs() <= 1e-8 * g.margins.slope_bound);
}

#[test]
fn centroid_certificate_for_a_coordinate_resonance() {
    let rot = build_rotated(&iso(), &ResonanceVector::new(vec![1, 0]).unwrap()).unwrap();
    let yhat = cube_decomposition(&rot).centroid(1);
    let eta = solve_eta(&rot, 0.0, &yhat).unwrap().x;
    let c = contraction_certificate(&rot, &[eta, yhat[0]], DEFAULT_GRID).unwrap();
    assert!(c.slow_drift.pass && c.curvature_drift.pass);
    assert!(c.contraction_factor <= 0.5);
}

#[test]
fn nonresonance_report_is_deterministic() {
    let model = iso();
    let params = covering_params(&model, 1e-24, 12.0, 2.0).unwrap();
    let rot = build_rotated(&model, &ResonanceVector::new(vec![0, 1]).unwrap()).unwrap();
    let a = check_nonresonance(&rot, &params, 500, 4).unwrap();
    let b = check_nonresonance(&rot, &params, 500, 4).unwrap();
    assert_eq!(a.records.len(), 500);
    assert_eq!(a.worst_margin, b.worst_margin);
    assert!(a.records.iter().all(|r| r.margin >= a.worst_margin));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn eta_solves_the_slow_equation(a in -3i64..=3, b in 1i64..=3, w in -1.0f64..1.0, t in 0.0f64..1.0) {
        let k = ResonanceVector::from_direction(&[a, b]).unwrap();
        let rot = build_rotated(&iso(), &k).unwrap();
        let cubes = cube_decomposition(&rot);
        prop_assume!(!cubes.cubes.is_empty());
        let j = &cubes.cubes[((t * cubes.cubes.len() as f64) as usize).min(cubes.cubes.len() - 1)];
        let yhat = cubes.sub_grid(j, 1).remove(0);
        let varpi = w * rot.frame.varpi0_k;
        let r = solve_eta(&rot, varpi, &yhat).unwrap();
        prop_assert!(r.residual <= r.tolerance);
        let mut y = vec![r.x];
        y.extend_from_slice(&yhat);
        prop_assert!((rot.d_slow(&y) - varpi).abs() <= r.tolerance);
    }
}

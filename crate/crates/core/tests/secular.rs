use num_complex::Complex64;
use resokam_core::lattice::{unimodular_completion, FrameConstants, ResonanceVector};
use resokam_core::model::{build_model, ModelSpec};
use resokam_core::resgraph::build_rotated;
use resokam_core::secular::{fast_angle_average, quadrature_average, required_nodes, standard_form, TrigPotential};

fn pot() -> TrigPotential {
    // cos x1 + cos(x1 - x2)
    TrigPotential::new(
        2,
        [
            (vec![1, 0], Complex64::new(0.5, 0.0)),
            (vec![-1, 0], Complex64::new(0.5, 0.0)),
            (vec![1, -1], Complex64::new(0.5, 0.0)),
            (vec![-1, 1], Complex64::new(0.5, 0.0)),
        ],
    )
    .unwrap()
}

#[test]
fn average_keeps_only_multiples_of_k() {
    let consts = FrameConstants {
        gamma: 1.0,
        lip: 1.0,
        r: 1.0,
        r_tilde: None,
    };
    let frame = unimodular_completion(&ResonanceVector::new(vec![1, -1]).unwrap(), &consts).unwrap();
    let fast = fast_angle_average(&pot(), &frame);
    let quad = quadrature_average(&pot(), &frame, required_nodes(&pot(), &frame));
    assert_eq!(fast.keys().copied().collect::<Vec<_>>(), vec![-1, 1]);
    for (j, c) in &fast {
        assert!((c - quad[j]).norm() < 1e-12);
    }
}

#[test]
fn standard_form_of_a_cosine_has_a_pendulum() {
    let model = build_model(&ModelSpec::isotropic_unit_ball(2, 0.25)).unwrap();
    let rot = build_rotated(&model, &ResonanceVector::new(vec![1, 0]).unwrap()).unwrap();
    let sf = standard_form(&rot, &pot(), None, 1e-6).unwrap();
    assert!(sf.real && !sf.degenerate);
    assert!(sf.critical_points.len() >= 2);
    assert!(sf.pendulum_energies.is_some());
}

//! First-order secular data along a simple resonance.

mod average;
mod potential;
mod standard;

pub use average::{fast_angle_average, quadrature_average, required_nodes};
pub use potential::TrigPotential;
pub use standard::{
    critical_points_of, curvature_at, standard_form, CriticalKind, CriticalPoint, PendulumEnergies, StandardFormData,
};

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::lattice::{unimodular_completion, FrameConstants, ResonanceVector};
    use crate::model::{build_model, ModelSpec};
    use crate::resgraph::build_rotated;

    const UNIT: FrameConstants = FrameConstants {
        gamma: 1.0,
        lip: 1.0,
        r: 0.25,
        r_tilde: None,
    };

    fn kv(e: &[i64]) -> ResonanceVector {
        ResonanceVector::new(e.to_vec()).unwrap()
    }

    fn two_cosines() -> TrigPotential {
        TrigPotential::from_cosines(2, &[(vec![1, 0], 1.0), (vec![1, -1], 1.0)]).unwrap()
    }

    #[test]
    fn average_along_one_minus_one() {
        let frame = unimodular_completion(&kv(&[1, -1]), &UNIT).unwrap();
        let avg = fast_angle_average(&two_cosines(), &frame);
        assert_eq!(avg.len(), 2);
        assert_eq!(avg[&1], Complex64::new(0.5, 0.0));
        assert_eq!(avg[&-1], Complex64::new(0.5, 0.0));
        let quad = quadrature_average(&two_cosines(), &frame, 64);
        for (j, c) in &quad {
            let exact = avg.get(j).copied().unwrap_or_default();
            assert!((c - exact).norm() < 1e-12, "j = {j}");
        }
    }

    #[test]
    fn average_without_parallel_modes_is_empty() {
        let frame = unimodular_completion(&kv(&[0, 1]), &UNIT).unwrap();
        assert!(fast_angle_average(&two_cosines(), &frame).is_empty());
    }

    #[test]
    fn multiples_are_reindexed() {
        let k = kv(&[2, -1, 1]);
        let frame = unimodular_completion(&k, &UNIT).unwrap();
        let c = Complex64::new(0.3, -0.7);
        let f = TrigPotential::new(3, [(vec![6, -3, 3], c), (vec![1, 0, 0], c)]).unwrap();
        let avg = fast_angle_average(&f, &frame);
        assert_eq!(avg.len(), 1);
        assert_eq!(avg[&3], c);
        let n = required_nodes(&f, &frame);
        for (j, v) in quadrature_average(&f, &frame, n) {
            let exact = avg.get(&j).copied().unwrap_or_default();
            assert!((v - exact).norm() < 1e-12, "j = {j}");
        }
    }

    #[test]
    fn curvature_values() {
        let m = build_model(&ModelSpec::isotropic_unit_ball(2, 0.25)).unwrap();
        let rot = build_rotated(&m, &kv(&[2, 3])).unwrap();
        assert!((curvature_at(&rot, &[0.0]).unwrap() - 6.5).abs() < 1e-14);

        let mut spec = ModelSpec::isotropic_unit_ball(2, 0.25);
        spec.family = "anisotropic_quadratic".into();
        spec.q = Some(vec![vec![2.0, 0.5], vec![0.5, 1.0]]);
        let m = build_model(&spec).unwrap();
        let rot = build_rotated(&m, &kv(&[1, 2])).unwrap();
        // ½ Qk·k = ½ (2 + 2 + 4)
        assert!((curvature_at(&rot, &[0.0]).unwrap() - 4.0).abs() < 1e-14);

        let mut spec = ModelSpec::isotropic_unit_ball(2, 0.25);
        spec.family = "quadratic_quartic".into();
        spec.c = Some(0.1);
        let m = build_model(&spec).unwrap();
        let rot = build_rotated(&m, &kv(&[1, 0])).unwrap();
        let mk = curvature_at(&rot, &[0.0]).unwrap();
        let (g, l) = (m.constants.gamma, m.constants.lip);
        assert!(mk >= g / 2.0 && mk <= l / 2.0);
        let h = 1e-4;
        let second = (rot.d_slow(&[h, 0.0]) - rot.d_slow(&[-h, 0.0])) / (2.0 * h);
        assert!((2.0 * mk - second).abs() < 1e-6);
    }

    #[test]
    fn standard_form_pendulum() {
        let m = build_model(&ModelSpec::isotropic_unit_ball(2, 0.25)).unwrap();
        let rot = build_rotated(&m, &kv(&[1, -1])).unwrap();
        let sf = standard_form(&rot, &two_cosines(), None, 1e-3).unwrap();
        assert!((sf.m_k - 1.0).abs() < 1e-14);
        assert!(!sf.degenerate && sf.real);
        assert!((sf.g0[&1].re - 0.5).abs() < 1e-14);
        let e = sf.pendulum_energies.as_ref().unwrap();
        assert!((e.separatrix - 1e-3).abs() < 1e-14);
        assert!((e.min + 1e-3).abs() < 1e-14);
        assert_eq!(sf.critical_points.len(), 2);
        let max = sf.critical_points.iter().find(|c| c.kind == CriticalKind::Max).unwrap();
        assert!(max.theta.abs() < 1e-9 || (max.theta - 2.0 * std::f64::consts::PI).abs() < 1e-9);
        assert_eq!(sf.remainders.values().next().unwrap(), "not computed");

        let doubled = standard_form(&rot, &two_cosines(), Some(&sf.yhat0), 2e-3).unwrap();
        assert_eq!(doubled.g0, sf.g0);
        let d = doubled.pendulum_energies.unwrap();
        assert!((d.separatrix - 2.0 * e.separatrix).abs() < 1e-16);
        assert!((d.min - 2.0 * e.min).abs() < 1e-16);

        let rot = build_rotated(&m, &kv(&[0, 1])).unwrap();
        let deg = standard_form(&rot, &two_cosines(), None, 1e-3).unwrap();
        assert!(deg.degenerate && deg.pendulum_energies.is_none() && !deg.notes.is_empty());
        assert!(standard_form(&rot, &two_cosines(), None, 2.0).is_err());
    }

    #[test]
    fn critical_points_of_two_harmonics() {
        // g = cos t + 0.2 cos 2t: max at 0, min at pi, both non-degenerate
        let g = [(1, 0.5), (-1, 0.5), (2, 0.1), (-2, 0.1)]
            .into_iter()
            .map(|(j, c)| (j, Complex64::new(c, 0.0)))
            .collect();
        let cps = critical_points_of(&g);
        assert_eq!(cps.len(), 2);
        let min = cps.iter().find(|c| c.kind == CriticalKind::Min).unwrap();
        assert!((min.theta - std::f64::consts::PI).abs() < 1e-9);
        assert!((min.value - (-1.0 + 0.2)).abs() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn potential(n: usize) -> impl Strategy<Value = TrigPotential> {
            prop::collection::vec((prop::collection::vec(-3i64..=3, n), -1.0f64..1.0, -1.0f64..1.0), 1..8)
                .prop_map(move |ms| TrigPotential::new(n, ms.into_iter().map(|(m, a, b)| (m, Complex64::new(a, b)))).unwrap())
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn parseval_and_quadrature(f in potential(2), k0 in 1i64..4, k1 in -3i64..4) {
                let Ok(k) = ResonanceVector::from_direction(&[k0, k1]) else { return Ok(()) };
                let frame = unimodular_completion(&k, &UNIT).unwrap();
                let avg = fast_angle_average(&f, &frame);
                let kept: f64 = avg.values().map(|c| c.norm_sqr()).sum();
                prop_assert!(kept <= f.energy() + 1e-12);
                let quad = quadrature_average(&f, &frame, required_nodes(&f, &frame));
                for (j, v) in &quad {
                    let exact = avg.get(j).copied().unwrap_or_default();
                    prop_assert!((v - exact).norm() < 1e-10);
                }
            }
        }
    }
}

use proptest::prelude::*;
use resokam_core::lattice::{
    enumerate_generators, gcd_slice, inverse_bound_squared, unimodular_completion, CompletionRegistry,
    FrameConstants, IntMatrix, NormSelector, ResonanceVector,
};

const CONSTS: FrameConstants = FrameConstants {
    gamma: 1.0,
    lip: 1.0,
    r: 1.0,
    r_tilde: None,
};

#[test]
fn generators_are_primitive_and_sign_normalised() {
    for n in 2..=4 {
        for k in enumerate_generators(n, 5.0, &NormSelector::OneNorm).unwrap() {
            assert_eq!(gcd_slice(k.entries()), 1);
            assert!(*k.entries().iter().find(|&&v| v != 0).unwrap() > 0);
            assert!(k.norm1() <= 5);
        }
    }
}

#[test]
fn generator_counts_in_the_plane() {
    // primitive vectors up to sign with |k|_1 <= K: 2 + 2 * #{(a, b): a, b >= 1, a + b <= K, gcd = 1}
    let counts: Vec<usize> = (1..=4)
        .map(|k| enumerate_generators(2, k as f64, &NormSelector::OneNorm).unwrap().len())
        .collect();
    assert_eq!(counts, vec![2, 4, 8, 12]);
}

#[test]
fn every_registered_strategy_yields_a_frame() {
    let registry = CompletionRegistry::default();
    let k = ResonanceVector::new(vec![3, -5, 2]).unwrap();
    for name in registry.names() {
        let (a, a_inv) = registry.complete_certified(&k, name, None).unwrap();
        assert_eq!(a.determinant().unwrap(), 1, "{name}");
        assert_eq!(a.row(0), k.entries(), "{name}");
        assert_eq!(a.checked_mul(&a_inv).unwrap(), IntMatrix::identity(3), "{name}");
    }
}

#[test]
fn rotation_round_trips() {
    let k = ResonanceVector::new(vec![2, 3]).unwrap();
    let f = unimodular_completion(&k, &CONSTS).unwrap();
    let y = [0.3, -0.7];
    let back = f.to_original(&f.to_rotated(&y));
    assert!(back.iter().zip(&y).all(|(a, b)| (a - b).abs() < 1e-14));
}

proptest! {
    #[test]
    fn completion_is_certified(v in prop::collection::vec(-9i64..=9, 2..=4)) {
        prop_assume!(v.iter().any(|&x| x != 0));
        let k = ResonanceVector::from_direction(&v).unwrap();
        let f = unimodular_completion(&k, &CONSTS).unwrap();
        let n = k.dim();
        prop_assert_eq!(f.a.determinant().unwrap(), 1);
        prop_assert_eq!(f.a.max_abs(), k.norm_inf());
        prop_assert_eq!(f.a.checked_mul(&f.a_inv).unwrap(), IntMatrix::identity(n));
        let m = f.a_inv.max_abs() as i128;
        prop_assert!(m * m <= inverse_bound_squared(n, k.norm_inf()).unwrap());
    }
}

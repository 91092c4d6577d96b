use std::f64::consts::{PI, TAU};

use mub6_core::analysis::count_h2_submatrices;
use mub6_core::equivalence::{apply, dephase, is_dephased};
use mub6_core::families::{b6, fourier_f6, m6, s6};
use mub6_core::linalg::{inner, is_hadamard};
use mub6_core::{CMat6, ColVec6, Tolerances, TransformRecord, Vec6, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn complex() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn vec6() -> impl Strategy<Value = ColVec6> {
    prop::array::uniform6(complex()).prop_map(Vec6)
}

fn family(k: u8, p: f64) -> CMat6 {
    let tol = Tolerances::default();
    match k % 4 {
        0 => fourier_f6(p, -p / 2.0),
        1 => m6(0.5 * PI + 0.01 + (p.rem_euclid(PI / 2.0 - 0.02)), &tol).unwrap(),
        2 => b6(1.3 + p.rem_euclid(PI - 1.3)).unwrap(),
        _ => s6(),
    }
}

proptest! {
    #[test]
    fn inner_is_conjugate_symmetric(u in vec6(), v in vec6()) {
        let uv = inner(&u, &v);
        let vu = inner(&v, &u);
        prop_assert!((uv - vu.conj()).norm() < 1e-12);
        prop_assert!(inner(&u, &u).im.abs() < 1e-12);
        prop_assert!(inner(&u, &u).re >= 0.0);
    }

    #[test]
    fn hadamard_survives_adjoint_and_transpose(k in 0u8..4, p in 0.0..TAU) {
        let tol = Tolerances::default();
        let h = family(k, p);
        prop_assert!(is_hadamard(&h, &tol));
        prop_assert!(is_hadamard(&h.adjoint(), &tol));
        prop_assert!(is_hadamard(&h.transpose(), &tol));
    }

    #[test]
    fn equivalence_preserves_structure(k in 0u8..4, p in 0.0..TAU, seed in any::<u64>()) {
        let tol = Tolerances::default();
        let h = family(k, p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r1 = TransformRecord::random(&mut rng);
        let r2 = TransformRecord::random(&mut rng);
        let g = apply(&h, &r1);
        prop_assert!(is_hadamard(&g, &tol));
        prop_assert_eq!(count_h2_submatrices(&g, &tol), count_h2_submatrices(&h, &tol));
        let (d, _) = dephase(&g).unwrap();
        prop_assert!(is_dephased(&d, &tol));
        let (dd, _) = dephase(&d).unwrap();
        prop_assert!(dd.max_abs_diff(&d) < 1e-15);
        // Two-step application equals the composed record.
        let two_step = apply(&g, &r2);
        prop_assert!(two_step.max_abs_diff(&apply(&h, &r1.then(&r2))) < 1e-12);
    }

    /// A perturbation of one entry well above `eq_tol` breaks the Hadamard
    /// property; one well below does not.
    #[test]
    fn perturbation_band(k in 0u8..4, p in 0.0..TAU, i in 0usize..6, j in 0usize..6, phase in 0.0..TAU) {
        let tol = Tolerances::default();
        let h = family(k, p);
        let bump = |size: f64| {
            let mut g = h.clone();
            g[(i, j)] += C64::from_polar(size, phase);
            g
        };
        prop_assert!(is_hadamard(&bump(1e-12), &tol));
        prop_assert!(!is_hadamard(&bump(1e-6), &tol));
    }
}

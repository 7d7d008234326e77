use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use specfn_core::linalg::random::{gaussian_matrix, gaussian_vector, haar_unitary, rank_r_matrix, seeded};
use specfn_core::linalg::{
    c64, compact_svd, matrix_from_json, matrix_to_json, spectral_data, unitary_invariant_norm, NormKind,
};
use specfn_core::{CMatrix, RankOne, C64};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn singular_values_are_unitarily_invariant(seed in any::<u64>(), n in 2usize..7) {
        let mut r = seeded(seed);
        let a = gaussian_matrix(&mut r, n);
        let (u, v) = (haar_unitary(&mut r, n), haar_unitary(&mut r, n));
        let b = &(&u * &a) * &v;
        for (s, t) in a.singular_values().iter().zip(b.singular_values()) {
            prop_assert!(close(*s, t, 1e-10));
        }
    }

    #[test]
    fn frobenius_from_singular_values_matches_entries(seed in any::<u64>(), n in 1usize..7) {
        let a = gaussian_matrix(&mut seeded(seed), n);
        let entrywise = a.as_matrix().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(close(unitary_invariant_norm(&a, NormKind::Frobenius), entrywise, 1e-12));
    }

    #[test]
    fn norm_family_ordering(seed in any::<u64>(), n in 2usize..7) {
        let a = gaussian_matrix(&mut seeded(seed), n);
        let op = unitary_invariant_norm(&a, NormKind::Operator);
        let fro = unitary_invariant_norm(&a, NormKind::Frobenius);
        let tr = unitary_invariant_norm(&a, NormKind::Trace);
        let s3 = unitary_invariant_norm(&a, NormKind::schatten(3.0).unwrap());
        prop_assert!(op <= s3 * (1.0 + 1e-12) && s3 <= fro * (1.0 + 1e-12) && fro <= tr * (1.0 + 1e-12));
        prop_assert!(close(unitary_invariant_norm(&a, NormKind::KyFan(n)), tr, 1e-12));
        prop_assert!(close(unitary_invariant_norm(&a, NormKind::KyFan(1)), op, 1e-12));
        prop_assert!(close(unitary_invariant_norm(&a, NormKind::schatten(2.0).unwrap()), fro, 1e-12));
    }

    #[test]
    fn rank_one_round_trip(seed in any::<u64>(), n in 2usize..7) {
        let mut r = seeded(seed);
        let (x, f) = (gaussian_vector(&mut r, n), gaussian_vector(&mut r, n));
        let ro = RankOne::new(x.clone(), f.clone()).unwrap();
        let m = ro.to_matrix();
        prop_assert_eq!(m.rank(), 1);
        prop_assert!(close(ro.norm(), x.norm() * f.norm(), 1e-12));
        prop_assert!(close(m.operator_norm(), x.norm() * f.norm(), 1e-10));
        // tr(x⊗f) = ⟨x, f⟩
        prop_assert!((ro.trace() - x.inner(&f)).norm() <= 1e-10 * ro.norm());
        let back = RankOne::from_matrix(&m).unwrap().to_matrix();
        prop_assert!(back.max_abs_diff(&m) <= 1e-10 * ro.norm());
    }

    #[test]
    fn compact_svd_reconstructs(seed in any::<u64>(), n in 2usize..7, rank in 1usize..7) {
        let rank = rank.min(n);
        let a = rank_r_matrix(&mut seeded(seed), n, rank);
        let svd = compact_svd(&a).unwrap();
        prop_assert_eq!(svd.singular_values.len(), rank);
        prop_assert_eq!(a.rank(), rank);
        let sigma = DMatrix::from_diagonal(&DVector::from_iterator(rank, svd.singular_values.iter().map(|&s| c64(s, 0.0))));
        let rebuilt = &svd.left * sigma * svd.right.adjoint();
        prop_assert!((rebuilt - a.as_matrix()).norm() <= 1e-9 * a.frobenius_norm());
        // orthonormal factors
        prop_assert!((svd.left.adjoint() * &svd.left - DMatrix::<C64>::identity(rank, rank)).norm() <= 1e-10);
        prop_assert!((svd.right.adjoint() * &svd.right - DMatrix::<C64>::identity(rank, rank)).norm() <= 1e-10);
    }

    #[test]
    fn eigenvalues_sum_to_trace(seed in any::<u64>(), n in 1usize..7) {
        let a = gaussian_matrix(&mut seeded(seed), n);
        let data = spectral_data(&a).unwrap();
        let sum: C64 = data.eigenvalues.iter().sum();
        prop_assert!((sum - a.trace()).norm() <= 1e-9 * (1.0 + a.frobenius_norm()));
        prop_assert!(data.spectral_radius() <= a.operator_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), n in 1usize..6) {
        let a = gaussian_matrix(&mut seeded(seed), n);
        let b = matrix_from_json(&matrix_to_json(&a)).unwrap();
        prop_assert_eq!(a.max_abs_diff(&b), 0.0);
    }
}

#[test]
fn json_rejects_ragged_rows() {
    assert!(matrix_from_json(r#"{"dim":2,"rows":[[[1,0],[0,0]],[[0,0]]]}"#).is_err());
    assert!(matrix_from_json(r#"{"dim":1,"rows":[[[1,0]]]}"#).is_ok());
    assert!(matrix_from_json("not json").is_err());
}

#[test]
fn unit_matrix_is_nilpotent() {
    let e = CMatrix::unit(3, 0, 1);
    assert_eq!((&e * &e).frobenius_norm(), 0.0);
    assert_eq!(e.singular_values(), vec![1.0, 0.0, 0.0]);
}

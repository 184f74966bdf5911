mod common;

use common::*;
use oil_core::numlin::{inverse, op_norm, pinv, rank, relative_error, solve_square, svd, Matrix};
use oil_core::ToleranceProfile;
use proptest::prelude::*;

fn tol() -> ToleranceProfile {
    ToleranceProfile::default()
}

fn residual(x: &Matrix, y: &Matrix) -> f64 {
    op_norm(&(x - y)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn penrose_equations(a in low_rank(8)) {
        let b = pinv(&a, &tol()).unwrap();
        let scale = 1e-8 * (1.0 + op_norm(&a).unwrap());
        prop_assert!(residual(&(&(&a * &b) * &a), &a) <= scale);
        prop_assert!(residual(&(&(&b * &a) * &b), &b) <= scale * (1.0 + op_norm(&b).unwrap()));
        let ab = &a * &b;
        let ba = &b * &a;
        prop_assert!(residual(&ab.adjoint(), &ab) <= scale);
        prop_assert!(residual(&ba.adjoint(), &ba) <= scale);
    }

    #[test]
    fn pinv_is_an_involution(a in low_rank(8)) {
        let back = pinv(&pinv(&a, &tol()).unwrap(), &tol()).unwrap();
        prop_assert!(residual(&back, &a) <= 1e-8 * (1.0 + op_norm(&a).unwrap()));
    }

    #[test]
    fn rank_invariant_under_adjoint(a in low_rank(8)) {
        prop_assert_eq!(rank(&a, &tol()).unwrap(), rank(&a.adjoint(), &tol()).unwrap());
    }

    #[test]
    fn op_norm_matches_power_iteration(a in low_rank(8)) {
        let s = op_norm(&a).unwrap();
        let p = power_norm(&a);
        prop_assert!((s - p).abs() <= 1e-7 * (1.0 + s), "svd {} power {}", s, p);
    }

    #[test]
    fn submultiplicative(
        (a, b) in (1..=6usize, 1..=6usize, 1..=6usize).prop_flat_map(|(m, k, n)| (matrix(m, k), matrix(k, n)))
    ) {
        let ab = op_norm(&(&a * &b)).unwrap();
        prop_assert!(ab <= op_norm(&a).unwrap() * op_norm(&b).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn svd_factors_are_unitary_and_reconstruct(a in low_rank(8)) {
        let f = svd(&a).unwrap();
        let (m, n) = a.shape();
        prop_assert!(residual(&(&f.left_vectors.adjoint() * &f.left_vectors), &Matrix::identity(m)) <= 1e-12);
        prop_assert!(residual(&(&f.right_vectors.adjoint() * &f.right_vectors), &Matrix::identity(n)) <= 1e-12);
        prop_assert!(residual(&f.reconstruct(), &a) <= 1e-12 * (1.0 + op_norm(&a).unwrap()));
        prop_assert!(f.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn solve_agrees_with_elimination(
        (m, b) in (1..=7usize, 1..=3usize).prop_flat_map(|(n, k)| (matrix(n, n), matrix(n, k)))
    ) {
        let shifted = &m + &Matrix::identity(m.rows()).scale_real(5.0);
        let ours = solve_square(&shifted, &b, &tol()).unwrap();
        let theirs = gauss_solve(&shifted, &b).unwrap();
        prop_assert!(relative_error(&ours, &theirs).unwrap() <= 1e-10);
        let inv = inverse(&shifted, &tol()).unwrap();
        prop_assert!(residual(&(&shifted * &inv), &Matrix::identity(m.rows())) <= 1e-10);
    }
}

#[test]
fn pinv_of_known_rank_one() {
    // [[1, 1], [1, 1]]⁺ = [[1, 1], [1, 1]] / 4
    let a = Matrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
    let expect = a.scale_real(0.25);
    assert!(residual(&pinv(&a, &tol()).unwrap(), &expect) < 1e-14);
}

mod common;

use common::*;
use oil_core::instance_gen::{random_inner12_inverse, random_matrix_with_rank, random_subspace, rng_from_seed, GenRng};
use oil_core::numlin::{op_norm, pinv, relative_error, Matrix};
use oil_core::outer_inverse::{
    classical_cases, compute, defining_residuals, existence, mp_via_12_inverse, oracle_compute, ClassicalInverse,
};
use oil_core::{OuterInverseProblem, Subspace, ToleranceProfile};
use proptest::prelude::*;

fn tol() -> ToleranceProfile {
    ToleranceProfile::default()
}

/// A random `(A, T, S)` with `dim S = m − dim T`; may be infeasible.
fn random_problem(rng: &mut GenRng, m: usize, n: usize, r: usize, t: usize) -> OuterInverseProblem {
    let a = random_matrix_with_rank(m, n, r, rng);
    let t = random_subspace(n, t, rng);
    let s = random_subspace(m, m - t.dim(), rng);
    OuterInverseProblem::new(a, t, s).unwrap()
}

fn dims() -> impl Strategy<Value = (u64, usize, usize, usize, usize)> {
    (any::<u64>(), 1..=10usize, 1..=10usize)
        .prop_flat_map(|(seed, m, n)| (Just(seed), Just(m), Just(n), 0..=m.min(n)))
        .prop_flat_map(|(seed, m, n, r)| (Just(seed), Just(m), Just(n), Just(r), 0..=r))
}

/// `G` from the linear conditions `G·(A u_i) = u_i` on a basis of `T` and
/// `G·s_j = 0` on a basis of `S`, solved by plain elimination.
fn from_linear_conditions(p: &OuterInverseProblem) -> Option<Matrix> {
    let u = p.t().basis();
    let au = p.a() * u;
    let lhs = au.hcat(p.s().basis()).unwrap();
    let rhs = u.hcat(&Matrix::zeros(u.rows(), p.s().dim())).unwrap();
    // G·lhs = rhs  ⇔  lhs*·G* = rhs*
    Some(gauss_solve(&lhs.adjoint(), &rhs.adjoint())?.adjoint())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn feasible_problems_satisfy_definition((seed, m, n, r, t) in dims()) {
        let mut rng = rng_from_seed(seed);
        let p = random_problem(&mut rng, m, n, r, t);
        prop_assume!(existence(&p, &tol()).unwrap().exists);
        let res = compute(&p, &tol()).unwrap();
        prop_assert!(res.satisfies_definition(&tol()).unwrap(), "{:?}", res.residuals);
        let again = defining_residuals(&p, &res.g, &tol()).unwrap();
        prop_assert_eq!(again, res.residuals);
    }

    #[test]
    fn pinv_route_matches_basis_route((seed, m, n, r, t) in dims()) {
        let mut rng = rng_from_seed(seed);
        let p = random_problem(&mut rng, m, n, r, t);
        prop_assume!(existence(&p, &tol()).unwrap().exists);
        let g = compute(&p, &tol()).unwrap().g;
        let oracle = oracle_compute(&p, &tol()).unwrap();
        prop_assert!(relative_error(&g, &oracle).unwrap() <= 1e-8);
    }

    #[test]
    fn unique_solution_of_linear_conditions((seed, m, n, r, t) in dims()) {
        let mut rng = rng_from_seed(seed);
        let p = random_problem(&mut rng, m, n, r, t);
        prop_assume!(existence(&p, &tol()).unwrap().exists);
        let g = compute(&p, &tol()).unwrap().g;
        if let Some(h) = from_linear_conditions(&p) {
            prop_assert!(relative_error(&g, &h).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn projected_inner12_inverse_is_pinv((seed, m, n, r, _t) in dims()) {
        let mut rng = rng_from_seed(seed);
        let a = random_matrix_with_rank(m, n, r, &mut rng);
        let z = random_inner12_inverse(&a, &mut rng, &tol()).unwrap();
        let mp = mp_via_12_inverse(&a, &z, &tol()).unwrap();
        let reference = pinv(&a, &tol()).unwrap();
        prop_assert!(op_norm(&(&mp - &reference)).unwrap() <= 1e-8 * (1.0 + op_norm(&reference).unwrap()));
    }

    #[test]
    fn moore_penrose_case((seed, m, n, r, _t) in dims()) {
        let mut rng = rng_from_seed(seed);
        let a = random_matrix_with_rank(m, n, r, &mut rng);
        let g = classical_cases(&a, &ClassicalInverse::MoorePenrose, &tol()).unwrap().g;
        let reference = pinv(&a, &tol()).unwrap();
        prop_assert!(op_norm(&(&g - &reference)).unwrap() <= 1e-8 * (1.0 + op_norm(&reference).unwrap()));
    }

    #[test]
    fn group_inverse_commutes(seed in any::<u64>(), n in 1..=8usize, r_frac in 0.0..1.0f64) {
        let mut rng = rng_from_seed(seed);
        let r = ((n as f64) * r_frac) as usize;
        // Random similarity of diag(D, 0) has index at most 1.
        let core = Matrix::from_fn(n, n, |i, j| if i == j && i < r { c(1.0 + i as f64, 0.5) } else { c(0.0, 0.0) });
        let x = &Matrix::identity(n) + &oil_core::instance_gen::complex_gaussian(n, n, &mut rng).scale_real(0.2);
        let x_inv = gauss_solve(&x, &Matrix::identity(n)).unwrap();
        let a = &(&x * &core) * &x_inv;
        let g = classical_cases(&a, &ClassicalInverse::Group, &tol()).unwrap().g;
        let scale = 1e-8 * (1.0 + op_norm(&g).unwrap()) * (1.0 + op_norm(&a).unwrap());
        prop_assert!(op_norm(&(&(&a * &g) - &(&g * &a))).unwrap() <= scale);
        prop_assert!(op_norm(&(&(&(&a * &g) * &a) - &a)).unwrap() <= scale);
    }
}

#[test]
fn explicit_3x3_outer_inverse() {
    // A = diag(1, 2, 0) restricted to T = span(e1, e2) along S = span(e3)
    // gives diag(1, 1/2, 0).
    let a = Matrix::from_real_diag(&[1.0, 2.0, 0.0]);
    let e = |i: usize| (0..3).map(|j| c(if i == j { 1.0 } else { 0.0 }, 0.0)).collect::<Vec<_>>();
    let t = Subspace::span(3, &[e(0), e(1)], &tol()).unwrap();
    let s = Subspace::span(3, &[e(2)], &tol()).unwrap();
    let p = OuterInverseProblem::new(a, t, s).unwrap();
    let g = compute(&p, &tol()).unwrap().g;
    let expect = Matrix::from_real_diag(&[1.0, 0.5, 0.0]);
    assert!(op_norm(&(&g - &expect)).unwrap() < 1e-14);
    assert!(op_norm(&(&from_linear_conditions(&p).unwrap() - &expect)).unwrap() < 1e-14);
}

#[test]
fn oblique_3x3_against_elimination() {
    // Non-orthogonal T and S, so the answer is not a projected pseudoinverse.
    let a = Matrix::from_real_rows(&[&[2.0, 1.0, 0.0], &[0.0, 1.0, 1.0], &[1.0, 0.0, 1.0]]);
    let t = Subspace::span(
        3,
        &[vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]],
        &tol(),
    )
    .unwrap();
    let s = Subspace::span(3, &[vec![c(1.0, 0.0), c(-2.0, 0.0), c(3.0, 0.0)]], &tol()).unwrap();
    let p = OuterInverseProblem::new(a, t, s).unwrap();
    let g = compute(&p, &tol()).unwrap().g;
    let h = from_linear_conditions(&p).unwrap();
    assert!(relative_error(&g, &h).unwrap() < 1e-12);
    assert!(relative_error(&oracle_compute(&p, &tol()).unwrap(), &h).unwrap() < 1e-12);
}

#[test]
fn nilpotent_drazin_is_zero() {
    for n in 2..=6 {
        let a = Matrix::from_fn(n, n, |i, j| if j == i + 1 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let g = classical_cases(&a, &ClassicalInverse::Drazin, &tol()).unwrap().g;
        assert!(g.max_abs() <= 1e-8);
    }
}

#[test]
fn infeasible_when_t_inside_kernel() {
    let a = Matrix::from_real_diag(&[1.0, 0.0]);
    let t = Subspace::span(2, &[vec![c(0.0, 0.0), c(1.0, 0.0)]], &tol()).unwrap();
    let s = Subspace::span(2, &[vec![c(0.0, 0.0), c(1.0, 0.0)]], &tol()).unwrap();
    let p = OuterInverseProblem::new(a, t, s).unwrap();
    let err = compute(&p, &tol()).unwrap_err();
    assert!(err.to_string().contains("kernel intersection nontrivial"), "{err}");
}

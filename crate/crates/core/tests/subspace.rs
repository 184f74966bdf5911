mod common;

use common::*;
use oil_core::instance_gen::{perturb_subspace_exact_gap, random_subspace, rng_from_seed};
use oil_core::numlin::{op_norm, Matrix};
use oil_core::subspace::{complementedness_check, delta, direct_sum_is_whole, gap_hat, oblique_projector};
use oil_core::{Subspace, ToleranceProfile};
use proptest::prelude::*;

fn tol() -> ToleranceProfile {
    ToleranceProfile::default()
}

fn pair() -> impl Strategy<Value = (u64, usize, usize, usize)> {
    (any::<u64>(), 1..=8usize).prop_flat_map(|(seed, n)| (Just(seed), Just(n), 0..=n, 0..=n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gap_is_max_of_directed_gaps((seed, n, k, l) in pair()) {
        let mut rng = rng_from_seed(seed);
        let m = random_subspace(n, k, &mut rng);
        let p = random_subspace(n, l, &mut rng);
        let lhs = gap_hat(&m, &p).unwrap();
        let rhs = delta(&m, &p).unwrap().max(delta(&p, &m).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-10, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn projector_matches_gram_formula((seed, n, k, _l) in pair()) {
        let mut rng = rng_from_seed(seed);
        // A skewed spanning set, so the library must orthonormalize it.
        let raw = &random_subspace(n, k, &mut rng).basis().clone()
            * &(&Matrix::identity(k) + &oil_core::instance_gen::complex_gaussian(k, k, &mut rng).scale_real(0.3));
        let s = Subspace::from_spanning_set(&raw, &tol()).unwrap();
        if let Some(p) = projector_from_basis(&raw) {
            prop_assert_eq!(s.dim(), k);
            prop_assert!(op_norm(&(&s.projector() - &p)).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn directed_gap_dominates_every_sample((seed, n, k, l) in pair()) {
        let mut rng = rng_from_seed(seed);
        let m = random_subspace(n, k, &mut rng);
        let p = random_subspace(n, l, &mut rng);
        let d = delta(&m, &p).unwrap();
        for _ in 0..20 {
            if k == 0 { break; }
            let x = m.basis() * &oil_core::instance_gen::complex_gaussian(k, 1, &mut rng);
            let x = x.scale_real(1.0 / x.frobenius_norm());
            prop_assert!(p.dist(x.as_slice()).unwrap() <= d + 1e-12);
        }
    }

    #[test]
    fn complementary_oblique_projectors_sum_to_identity((seed, n, k, _l) in pair()) {
        let mut rng = rng_from_seed(seed);
        let m = random_subspace(n, k, &mut rng);
        let p = random_subspace(n, n - k, &mut rng);
        prop_assume!(direct_sum_is_whole(&m, &p, &tol()).unwrap());
        let onto_m = oblique_projector(&m, &p, &tol()).unwrap();
        let onto_p = oblique_projector(&p, &m, &tol()).unwrap();
        let sum = &onto_m.matrix + &onto_p.matrix;
        let scale = 1.0 + onto_m.norm().unwrap();
        prop_assert!(op_norm(&(&sum - &Matrix::identity(n))).unwrap() <= 1e-9 * scale);
        prop_assert!(onto_m.idempotency_residual().unwrap() <= 1e-9 * scale * scale);
        // Range and kernel as prescribed.
        prop_assert!(op_norm(&(&(&onto_m.matrix * m.basis()) - m.basis())).unwrap() <= 1e-9 * scale);
        prop_assert!(op_norm(&(&onto_m.matrix * p.basis())).unwrap() <= 1e-9 * scale);
    }

    #[test]
    fn small_gap_keeps_complement((seed, n, k, _l) in pair(), frac in 0.0..0.999f64) {
        prop_assume!(k >= 1 && k < n);
        let mut rng = rng_from_seed(seed);
        let m = random_subspace(n, k, &mut rng);
        let p = random_subspace(n, n - k, &mut rng);
        prop_assume!(direct_sum_is_whole(&m, &p, &tol()).unwrap());
        let proj = oblique_projector(&m, &p, &tol()).unwrap();
        let threshold = 1.0 / (1.0 + proj.norm().unwrap());
        let moved = perturb_subspace_exact_gap(&m, (frac * threshold).asin(), &mut rng).unwrap();
        let rep = complementedness_check(&proj, &moved, &tol()).unwrap();
        if rep.hypothesis.clearly_satisfied() {
            prop_assert!(rep.complemented);
        }
    }
}

#[test]
fn sampled_sup_matches_directed_gap() {
    let mut rng = rng_from_seed(11);
    let mut worst: f64 = 0.0;
    for trial in 0..40 {
        let n = 2 + trial % 5;
        let k = 1 + trial % (n - 1);
        let l = trial % n;
        let m = random_subspace(n, k, &mut rng);
        let p = random_subspace(n, l, &mut rng);
        let exact = delta(&m, &p).unwrap();
        let sampled = sampled_directed_gap(&m, &p, 2000, &mut rng);
        assert!(sampled <= exact + 1e-12);
        worst = worst.max(exact - sampled);
    }
    assert!(worst <= 1e-3, "sampled supremum off by {worst}");
}

use oil_core::instance_gen::{generate, GenConfig};
use oil_core::outer_inverse::existence;
use oil_core::perturbation::Theorem;
use oil_core::ToleranceProfile;
use proptest::prelude::*;

fn tol() -> ToleranceProfile {
    ToleranceProfile::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn targets_are_hit_exactly(seed in any::<u64>(), th in prop::sample::select(Theorem::ALL.to_vec()), ratio in 0.0..0.99f64) {
        let cfg = GenConfig { seed, target_gap_t: ratio, target_gap_s: ratio, target_norm_e_ratio: ratio, ..GenConfig::default() };
        let inst = generate(&cfg, th, &tol()).unwrap();
        prop_assert!((inst.achieved_gap_t - inst.target_gap_t).abs() <= 1e-10);
        prop_assert!((inst.achieved_gap_s - inst.target_gap_s).abs() <= 1e-10);
        prop_assert!((inst.achieved_norm_e - inst.target_norm_e).abs() <= 1e-12);
        prop_assert!(inst.hypothesis_statuses.iter().all(|h| h.clearly_satisfied()));
    }
}

#[test]
fn hundred_instances_at_half_threshold_are_feasible() {
    for th in Theorem::ALL {
        for seed in 0..100 {
            let inst = generate(&GenConfig { seed, ..GenConfig::default() }, th, &tol()).unwrap();
            assert!(existence(inst.scenario.base(), &tol()).unwrap().exists);
            assert!(inst.hypothesis_statuses.iter().all(|h| h.satisfied));
        }
    }
}

#[test]
fn fixed_dimensions_are_respected() {
    let cfg: GenConfig = serde_json::from_str(r#"{"seed": 5, "m": 6, "n": 4, "rank_a": 3, "dim_t": 2}"#).unwrap();
    let inst = generate(&cfg, Theorem::Thm32, &tol()).unwrap();
    let p = inst.scenario.base();
    assert_eq!(p.a().shape(), (6, 4));
    assert_eq!(p.t().dim(), 2);
    assert_eq!(p.s().dim(), 4);
}

use rand::SeedableRng;
use realembed::witness::{
    caves_report, caves_state, evaluate_witness, run_witness, WitnessInstance,
};

#[test]
fn local_statistics_agree_and_global_ones_do_not() {
    let r = run_witness(1e-12).unwrap();
    assert!(r.passes, "{r:?}");
    assert_eq!(r.local_pairs, 100);
    assert!(r.local_max_deviation <= 1e-12);
    for (p, q) in r.kronecker_probabilities.iter().zip([0.5, 0.5]) {
        assert!((p - q).abs() <= 1e-12);
    }
    for (p, q) in r.r_product_probabilities.iter().zip([0.0, 1.0]) {
        assert!((p - q).abs() <= 1e-12);
    }
    assert!((r.total_variation - 0.5).abs() <= 1e-12);
}

#[test]
fn r_product_state_is_separable_over_complex_numbers_but_not_a_product() {
    let r = run_witness(1e-12).unwrap();
    assert!(r.separable_decomposition_distance <= 1e-12);
    assert!(r.r_product_marginal_distance > 0.1);
    assert!(r.state_distance > 0.1);
}

#[test]
fn tightest_tolerance_still_passes() {
    assert!(run_witness(1e-15).unwrap().passes);
}

#[test]
fn swapped_states_fail() {
    let mut w = WitnessInstance::standard().unwrap();
    std::mem::swap(&mut w.psi_k, &mut w.psi_r);
    let r = evaluate_witness(&w, 1e-12).unwrap();
    assert!(!r.passes);
    assert!(r.locally_indistinguishable);
}

#[test]
fn caves_sweep_separates_the_two_notions_of_independence() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(6);
    for alpha in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let r = caves_report(&mut rng, alpha, 50, 1e-10).unwrap();
        assert!(r.verdict.operational, "alpha {alpha}");
        assert_eq!(r.verdict.product_state, alpha == 0.0, "alpha {alpha}");
        assert!(r.formula_deviation < 1e-12);
    }
    assert!(caves_state(-0.1, 1e-10).is_err());
}

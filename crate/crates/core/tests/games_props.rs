mod common;

use proptest::prelude::*;
use rand::SeedableRng;

use bestchoice::games::{
    self, best_response, geometric_optimal_x, improve_on_inv_e, monotonicity_check, posterior,
    saddle::saddle_gap, Example,
};
use bestchoice::prior::{stochastic_order_compare, SampleSizeDistribution, StochasticOrder};
use bestchoice::INV_E;

const E: f64 = std::f64::consts::E;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn posterior_is_normalised(seed in any::<u64>(), t in 0.0..0.999f64, k in 0u64..40) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let points = common::random_finite_prior(&mut rng, 8, 120);
        prop_assume!(points.iter().any(|&(n, _)| n >= k));
        let nu = SampleSizeDistribution::finite(points).unwrap();
        let post = posterior(&nu, t, k.max(if t == 0.0 { 0 } else { k })).unwrap();
        prop_assert!((post.total() - 1.0).abs() < 1e-12);
        prop_assert!(post.points.iter().all(|&(n, _)| n >= k));
    }

    #[test]
    fn point_mass_posterior(n in 1u64..200, t in 0.001..0.999f64, frac in 0.0..=1.0f64) {
        let k = (frac * n as f64) as u64;
        let post = posterior(&SampleSizeDistribution::point_mass(n).unwrap(), t, k).unwrap();
        prop_assert_eq!(post.points, vec![(n, 1.0)]);
    }

    #[test]
    fn two_point_priors_increase_in_p(p in 0.0..1.0f64, dp in 0.001..1.0f64) {
        let q = (p + dp).min(1.0);
        prop_assume!(q > p);
        let a = SampleSizeDistribution::two_point(3, 6, p).unwrap();
        let b = SampleSizeDistribution::two_point(3, 6, q).unwrap();
        prop_assert_eq!(stochastic_order_compare(&a, &b).unwrap(), StochasticOrder::Nu2Dominates);
        prop_assert_eq!(stochastic_order_compare(&b, &a).unwrap(), StochasticOrder::Nu1Dominates);
        prop_assert_eq!(stochastic_order_compare(&a, &a).unwrap(), StochasticOrder::Equal);
    }

    #[test]
    fn payoff_bounded_by_best_response(b in 0.0..=1.0f64, p in 0.0..=1.0f64) {
        for ex in [Example::Example1, Example::Example2] {
            prop_assert!(ex.payoff(b, p) <= ex.optimal_value(p) + 1e-12);
        }
    }
}

#[test]
fn posterior_examples() {
    let nu = SampleSizeDistribution::two_point(10, 100, 0.5).unwrap();
    let post = posterior(&nu, 0.01, 11).unwrap();
    assert_eq!(post.points, vec![(100, 1.0)]);
    let prior = posterior(&nu, 0.0, 0).unwrap();
    assert!((prior.prob(10) - 0.5).abs() < 1e-15);
    assert!(posterior(&nu, 0.0, 3).is_err());
    assert!(posterior(&nu, 0.5, 101).is_err());
}

#[test]
fn geometric_examples() {
    let g = geometric_optimal_x(0.3).unwrap();
    assert!((g.x - 0.178_2).abs() < 1e-4, "{}", g.x);
    assert!((g.value - 1.3 / E).abs() < 1e-9);
    let at_threshold = geometric_optimal_x(1.0 / (E - 1.0)).unwrap();
    assert!(at_threshold.x.abs() < 1e-15);
    assert!((at_threshold.value - 1.0 / (E - 1.0)).abs() < 1e-9);
    let small = geometric_optimal_x(1e-4).unwrap();
    assert!((small.x - INV_E).abs() < 1e-4 && (small.value - INV_E).abs() < 1e-3);
    assert!(geometric_optimal_x(0.0).is_err());
}

#[test]
fn inv_e_is_never_optimal() {
    let mut priors = vec![
        Example::Example1.prior(games::game_example1_saddle().p_star).unwrap(),
        Example::Example2.prior(games::game_example2_saddle().p_star).unwrap(),
    ];
    for theta in [0.1, 0.3, 1.0] {
        priors.push(SampleSizeDistribution::geometric(theta).unwrap());
    }
    for nu in &priors {
        let imp = improve_on_inv_e(nu).unwrap();
        assert!(imp.gain() > 1e-6, "gain {}", imp.gain());
        assert!(imp.slope_at_inv_e < 0.0);
    }
}

#[test]
fn saddle_gaps_are_small() {
    for ex in [Example::Example1, Example::Example2] {
        let (minmax, maxmin) = saddle_gap(ex, 400);
        assert!(minmax >= maxmin - 1e-12);
        assert!(minmax - maxmin < 1e-4, "{ex}: {minmax} vs {maxmin}");
    }
}

#[test]
fn example_payoffs() {
    assert!((games::game_example1(0.0, 1.0) - 11.0 / 24.0).abs() < 1e-15);
    assert!((games::game_example1(1.0, 0.0) - 1.0).abs() < 1e-15);
    // d/db w(b, 6/11) vanishes at b = 1.
    let p = 6.0 / 11.0;
    let h = 1e-6;
    let slope = (games::game_example1(1.0, p) - games::game_example1(1.0 - h, p)) / h;
    assert!(slope.abs() < 1e-5, "{slope}");
    let (f1, f2) = games::game_example2(1.0);
    assert!((f1 - 0.5).abs() < 1e-15 && (f2 - bestchoice::exact::win_prob_d(2, 6).unwrap()).abs() < 1e-15);
    assert_eq!(Example::Example1.best_b(0.5), 1.0);
}

#[test]
fn equal_priors_are_no_counterexample() {
    let r = monotonicity_check(Example::Example1, 0.95, 0.95).unwrap();
    assert_eq!(r.order, StochasticOrder::Equal);
    assert!(!r.refutes_monotonicity);
    assert!(r.to_string().contains("equal, no counter-example"));
}

#[test]
fn counterexamples_cross_checked_by_dp() {
    for ex in [Example::Example1, Example::Example2] {
        let r = games::monotonicity_counterexample(ex).unwrap();
        assert!(r.refutes_monotonicity, "{r}");
        assert!((r.dp_value_a - r.value_a).abs() < 1e-3 && (r.dp_value_b - r.value_b).abs() < 1e-3);
        assert!(r.value_b - r.value_a > 1e-6);
    }
}

#[test]
fn dp_regions_and_grid_doubling() {
    let nu = SampleSizeDistribution::two_point(10, 100, 0.5).unwrap();
    let fine = best_response(&nu, 20_000).unwrap();
    let coarse = best_response(&nu, 10_000).unwrap();
    assert!((fine.value - coarse.value).abs() < 1e-3);
    assert!(!fine.accuracy_warning);
    // Stopping islands: indices 4..=10 are accepted only late, 11..=37 never.
    assert!(fine.never_accepts(2) && fine.never_accepts(20));
    assert!(!fine.never_accepts(5) && !fine.always_accepts(5));
    assert!(fine.always_accepts(50));
    for k in 1..=fine.max_index() {
        for iv in fine.region(k) {
            assert!(0.0 <= iv.start && iv.start <= iv.end && iv.end <= 1.0);
        }
    }
    // The first index is accepted on an interval in the (1,4) game.
    let ex = best_response(&Example::Example1.prior(0.95).unwrap(), 20_000).unwrap();
    assert!(ex.is_interval(1));
    assert!(best_response(&nu, 500).is_err());
}

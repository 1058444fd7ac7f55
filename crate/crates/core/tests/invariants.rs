//! Property tests of the public API: counting identities, pmf bounds, block
//! leaders and estimator ranges.

use std::collections::HashSet;

use proptest::prelude::*;
use rwrs_core::exceedance::{build_pattern, count_in, ProductSet, RegimeRule};
use rwrs_core::extremal::{block_leader_count, make_blocks, mu_prime, obrien_theta, order_visited_sites, BlockScheme, ThresholdRule};
use rwrs_core::limits::{poisson_pmf, poisson_void};
use rwrs_core::mixing::{dinfty_sum, dprime_sum_scenery};
use rwrs_core::scenery::{HeightSet, SceneryModel, TailFamily};
use rwrs_core::stats::Estimate;
use rwrs_core::walk::{sample_walk, StepDistribution};

fn walk_for(choice: u8) -> StepDistribution {
    match choice % 4 {
        0 => StepDistribution::symmetric_zeta(0.5).unwrap(),
        1 => StepDistribution::symmetric_zeta(1.5).unwrap(),
        2 => StepDistribution::simple_lazy(0.3).unwrap(),
        _ => StepDistribution::drift(),
    }
}

fn pareto() -> TailFamily {
    TailFamily::frechet(2.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn window_counts_are_range_increments(choice in 0u8..4, n in 1u64..1000, seed: u64, a in 0u32..=20, len in 0u32..=20) {
        let b = (a + len).min(20);
        let (a, b) = (a as f64 / 20.0, b as f64 / 20.0);
        let dist = walk_for(choice);
        let path = sample_walk(&dist, n, seed).unwrap();
        // Every discovery is a point when the height set is the whole line.
        let regime = RegimeRule::Transient { q_hat: Estimate::exact(1.0) };
        let pattern = build_pattern(&path, &SceneryModel::iid(pareto()), &pareto(), &regime, seed).unwrap();
        let set = ProductSet::new(a, b, HeightSet::above(f64::NEG_INFINITY).unwrap()).unwrap();
        let r = |k: u64| if k == 0 { 0 } else { path.range[k as usize - 1] };
        let (lo, hi) = ((n as f64 * a).floor() as u64, (n as f64 * b).floor() as u64);
        prop_assert_eq!(count_in(&pattern, &set), r(hi) - r(lo));
    }

    #[test]
    fn range_agrees_with_brute_force(choice in 0u8..4, n in 1u64..1000, seed: u64) {
        let path = sample_walk(&walk_for(choice), n, seed).unwrap();
        let mut seen = HashSet::new();
        for (k, &s) in path.positions.iter().enumerate() {
            seen.insert(s);
            prop_assert_eq!(path.range[k], seen.len() as u64);
        }
        prop_assert!(path.discovery_times.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(path.discovery_times.len() as u64, path.range[n as usize - 1]);
    }

    #[test]
    fn poisson_pmf_is_a_subprobability(lambda in 0.0f64..40.0, k_max in 0u64..200) {
        let set = ProductSet::new(0.0, 1.0, HeightSet::above(1.0).unwrap()).unwrap();
        prop_assert_eq!(poisson_pmf(1.0, 0), poisson_void(&set, &pareto()).unwrap());
        let total: f64 = (0..=k_max).map(|k| poisson_pmf(lambda, k)).sum();
        prop_assert!(total <= 1.0 + 1e-12);
        prop_assert!((0..=k_max).all(|k| poisson_pmf(lambda, k) >= 0.0));
    }

    #[test]
    fn leaders_never_exceed_exceedances(choice in 0u8..3, n in 50u64..1000, seed: u64, p in 0.0f64..1.0) {
        let path = sample_walk(&walk_for(choice), n, seed).unwrap();
        let ordered = order_visited_sites(&path);
        let scheme = BlockScheme::default_for(n).unwrap();
        let blocks = make_blocks(&ordered, &scheme).unwrap();
        let flags: Vec<bool> = ordered.iter().map(|&s| rwrs_core::rng::site_uniform(seed, s) < p).collect();
        let leaders = block_leader_count(&flags, &blocks);
        prop_assert!(leaders <= flags.iter().filter(|&&f| f).count() as u64);
        prop_assert!(leaders <= blocks.len() as u64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn estimators_stay_in_range(seed: u64, tau in 0.2f64..5.0) {
        let n = 1000;
        let dist = StepDistribution::symmetric_zeta(0.5).unwrap();
        let model = SceneryModel::iid(pareto());
        let scheme = BlockScheme::default_for(n).unwrap();
        let rule = ThresholdRule::Norming { tau };
        let mu = mu_prime(&dist, &model, &pareto(), n, &scheme, 100, rule, seed).unwrap();
        prop_assert!(mu.mu_prime.value >= 0.0 && mu.mu_prime.value <= 1.0 + 4.0 * mu.mu_prime.se);
        let q = Estimate::exact(0.8);
        for k in [1, 3] {
            let d = dinfty_sum(&dist, &model, &pareto(), n, k, scheme.k_n, 100, rule, &q, seed).unwrap();
            prop_assert!(d.estimate.value >= 0.0);
        }
        let s = dprime_sum_scenery(&SceneryModel::moving_max(2, pareto()).unwrap(), &pareto(), n, scheme.k_n, 100, rule, seed).unwrap();
        prop_assert!(s.estimate.value >= 0.0);
        let o = obrien_theta(&model, &pareto(), n, &scheme, 100, rule, seed).unwrap();
        prop_assert!((0.0..=1.0).contains(&o.theta.value));
    }
}

/// For an iid Pareto scenery with `n P(xi > u_n) = tau`, the maximum of `n`
/// values stays below `u_n` with probability near `exp(-tau)`.
#[test]
fn iid_maximum_below_norming_threshold() {
    let n = 10_000;
    let scheme = BlockScheme::default_for(n).unwrap();
    for tau in [0.5, 1.0, 2.0] {
        let rep = obrien_theta(&SceneryModel::iid(pareto()), &pareto(), n, &scheme, 4000, ThresholdRule::Norming { tau }, 17)
            .unwrap();
        // Exact value (1 - tau/n)^n sits within 1e-4 of exp(-tau) at this n.
        let exact = (1.0 - tau / n as f64).powi(n as i32);
        assert!(rep.max_below.within(exact, 0.0, 3.0), "tau {tau}: {:?} vs {exact}", rep.max_below);
        assert!((exact - (-tau).exp()).abs() < 1e-4);
    }
}

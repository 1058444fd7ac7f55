//! Empirical mixing sums: the anti-clustering sum `D'(u_n)` of a scenery and
//! of the walk-indexed sequence `xi(S_t)`, and the local sums of `D^k(u_n)`
//! over a table of `k`.
//!
//! Every estimator averages over all base positions of one realization:
//! the pair law of `(xi(t), xi(t + j))` does not depend on `t` by
//! stationarity of the scenery, and that of `(xi(S_{t+1}), xi(S_{t+j}))`
//! does not depend on `t` because walk increments are stationary and
//! independent of the scenery.

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};
use crate::exceedance::scenery_seed;
use crate::extremal::ThresholdRule;
use crate::scenery::{SceneryModel, TailFamily};
use crate::stats::{self, Estimate};
use crate::walk::{self, Regime, StepDistribution};

/// `k` values of the `D^k` table.
pub const DINFTY_KS: [u64; 5] = [1, 2, 4, 8, 16];

/// How joint exceedance probabilities along the walk are estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumMode {
    /// i.i.d. scenery: given the walk, the joint probability of a pattern of
    /// exceedances at distinct sites is a product of `p` and `1 - p`
    /// factors, computed exactly.
    Conditional,
    /// Scenery drawn per replica; joint events by frequency.
    Frequency,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingSumReport {
    pub n: u64,
    pub k_n: u64,
    pub r_n: u64,
    /// `k` of the `D^k` sum; `None` for the `D'` sums.
    pub k: Option<u64>,
    pub estimate: Estimate,
    /// Lower bound `tau (1 - q)` for the walk-indexed `D'` sum.
    pub reference_bound: Option<f64>,
    /// Closed form `n r_n p^2` for an i.i.d. scenery.
    pub closed_form: Option<f64>,
    pub threshold: f64,
    pub tail_prob: f64,
    pub mode: SumMode,
}

fn block_size(n: u64, k_n: u64) -> Result<u64> {
    if k_n == 0 || k_n > n {
        return Err(Error::Scheme(format!("k_n = {k_n} must lie in [1, n = {n}]")));
    }
    Ok(n / k_n)
}

/// `n sum_{j=1}^{r_n} P(xi(0) > u_n, xi(j) > u_n)` with `u_n` resolved at
/// level `n`. Each replica is a scenery window of `n + r_n` sites.
pub fn dprime_sum_scenery(
    model: &SceneryModel,
    tail: &TailFamily,
    n: u64,
    k_n: u64,
    replicas: u64,
    rule: ThresholdRule,
    master_seed: u64,
) -> Result<MixingSumReport> {
    let r = block_size(n, k_n)?;
    if replicas < 2 {
        return Err(Error::Parameter("at least 2 replicas are needed".into()));
    }
    let u = rule.resolve(tail, n)?;
    let p = tail.survival(u);
    let pairs: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|rep| {
            let flags = model.exceedances_on_range(0, (n + r) as usize, u, scenery_seed(master_seed, rep))?;
            let hits: Vec<usize> = flags.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i).collect();
            let mut count = 0u64;
            let mut hi = 0;
            for (i, &e) in hits.iter().enumerate() {
                if e >= n as usize {
                    break;
                }
                hi = hi.max(i + 1);
                while hi < hits.len() && hits[hi] <= e + r as usize {
                    hi += 1;
                }
                count += (hi - i - 1) as u64;
            }
            // n / (number of bases) = 1.
            Ok(count as f64)
        })
        .collect::<Result<_>>()?;
    Ok(MixingSumReport {
        n,
        k_n,
        r_n: r,
        k: None,
        estimate: stats::mean_se(&pairs),
        reference_bound: None,
        closed_form: model.is_iid().then(|| iid_scenery_dprime(n, r, p)),
        threshold: u,
        tail_prob: p,
        mode: SumMode::Frequency,
    })
}

/// `n r_n p^2`, the `D'` sum of an i.i.d. scenery.
pub fn iid_scenery_dprime(n: u64, r_n: u64, p: f64) -> f64 {
    n as f64 * r_n as f64 * p * p
}

/// Threshold of the walk-indexed sums, resolved at level `floor(q n)`.
fn walk_threshold(rule: ThresholdRule, tail: &TailFamily, n: u64, q_hat: &Estimate) -> Result<f64> {
    let level = (q_hat.value * n as f64).floor() as u64;
    if level == 0 {
        return Err(Error::DegenerateScale(format!("floor(q n) = 0 for q = {}, n = {n}", q_hat.value)));
    }
    rule.resolve(tail, level)
}

/// `sum_s sum_{j=k+1}^{r} P(xi(S_{s+1}) > u >= M'_{s+2,s+k}, xi(S_{s+j}) > u)`
/// over the bases `s` of one walk, conditional on the walk for an i.i.d.
/// scenery with exceedance probability `p`.
fn conditional_pair_sum(pos: &[i64], k: usize, r: usize, p: f64) -> f64 {
    let bases = pos.len() + 1 - r;
    let mut total = 0.0;
    let mut distinct: Vec<i64> = Vec::with_capacity(k);
    for s in 0..bases {
        let a = pos[s];
        let gap = &pos[s + 1..s + k];
        if gap.contains(&a) {
            continue;
        }
        distinct.clear();
        distinct.extend_from_slice(gap);
        distinct.sort_unstable();
        distinct.dedup();
        let lead = p * (1.0 - p).powi(distinct.len() as i32);
        let mut inner = 0.0;
        for &b in &pos[s + k..s + r] {
            if b == a {
                inner += 1.0;
            } else if distinct.binary_search(&b).is_err() {
                inner += p;
            }
        }
        total += lead * inner;
    }
    total
}

/// Frequency version of [`conditional_pair_sum`] for given exceedance flags
/// along the walk.
fn frequency_pair_sum(flags: &[bool], k: usize, r: usize) -> f64 {
    let bases = flags.len() + 1 - r;
    let mut total = 0u64;
    for s in 0..bases {
        if !flags[s] || flags[s + 1..s + k].iter().any(|&f| f) {
            continue;
        }
        total += flags[s + k..s + r].iter().filter(|&&f| f).count() as u64;
    }
    total as f64
}

#[allow(clippy::too_many_arguments)]
fn walk_sum(
    dist: &StepDistribution,
    model: &SceneryModel,
    n: u64,
    k: u64,
    r: u64,
    replicas: u64,
    u: f64,
    p: f64,
    master_seed: u64,
) -> Result<(Estimate, SumMode)> {
    if k == 0 || k >= r {
        return Err(Error::Scheme(format!("k = {k} must lie in [1, r_n = {r})")));
    }
    if replicas < 2 {
        return Err(Error::Parameter("at least 2 replicas are needed".into()));
    }
    let mode = if model.is_iid() { SumMode::Conditional } else { SumMode::Frequency };
    let bases = (n - r + 1) as f64;
    let (k, r) = (k as usize, r as usize);
    let sums: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|rep| {
            let mut rng = walk::walk_rng(master_seed, rep);
            let pos = walk::walk_positions(dist, n, &mut rng);
            let sum = match mode {
                SumMode::Conditional => conditional_pair_sum(&pos, k, r, p),
                SumMode::Frequency => {
                    let mut seen = FxHashSet::default();
                    let sites: Vec<i64> = pos.iter().copied().filter(|z| seen.insert(*z)).collect();
                    let f = model.exceedances(&sites, u, scenery_seed(master_seed, rep))?;
                    let lookup: FxHashMap<i64, bool> = sites.into_iter().zip(f).collect();
                    let flags: Vec<bool> = pos.iter().map(|z| lookup[z]).collect();
                    frequency_pair_sum(&flags, k, r)
                }
            };
            Ok(n as f64 * sum / bases)
        })
        .collect::<Result<_>>()?;
    Ok((stats::mean_se(&sums), mode))
}

fn require_transient(dist: &StepDistribution) -> Result<()> {
    if dist.regime() != Regime::Transient {
        return Err(Error::Regime(format!("walk-indexed mixing sums need a transient walk, got {dist}")));
    }
    Ok(())
}

/// `n sum_{j=2}^{r_n} P(xi(S_1) > u_n, xi(S_j) > u_n)` with `u_n` resolved
/// at level `floor(q n)`. Reports the lower bound `tau (1 - q)`.
#[allow(clippy::too_many_arguments)]
pub fn dprime_sum_rwrs(
    dist: &StepDistribution,
    model: &SceneryModel,
    tail: &TailFamily,
    n: u64,
    k_n: u64,
    replicas: u64,
    rule: ThresholdRule,
    q_hat: &Estimate,
    master_seed: u64,
) -> Result<MixingSumReport> {
    let mut rep = dinfty_sum(dist, model, tail, n, 1, k_n, replicas, rule, q_hat, master_seed)?;
    rep.k = None;
    rep.reference_bound = rule.tau().map(|tau| tau * (1.0 - q_hat.value));
    Ok(rep)
}

/// `n sum_{j=k+1}^{r_n} P(xi(S_1) > u_n >= M'_{2,k}, xi(S_j) > u_n)` with
/// `u_n` resolved at level `floor(q n)`; `k = 1` is the `D'` sum.
#[allow(clippy::too_many_arguments)]
pub fn dinfty_sum(
    dist: &StepDistribution,
    model: &SceneryModel,
    tail: &TailFamily,
    n: u64,
    k: u64,
    k_n: u64,
    replicas: u64,
    rule: ThresholdRule,
    q_hat: &Estimate,
    master_seed: u64,
) -> Result<MixingSumReport> {
    require_transient(dist)?;
    let r = block_size(n, k_n)?;
    let u = walk_threshold(rule, tail, n, q_hat)?;
    let p = tail.survival(u);
    let (estimate, mode) = walk_sum(dist, model, n, k, r, replicas, u, p, master_seed)?;
    Ok(MixingSumReport {
        n,
        k_n,
        r_n: r,
        k: Some(k),
        estimate,
        reference_bound: None,
        closed_form: None,
        threshold: u,
        tail_prob: p,
        mode,
    })
}

/// [`dinfty_sum`] for every `k` in `ks` below `r_n`, on shared seeds.
#[allow(clippy::too_many_arguments)]
pub fn dinfty_table(
    dist: &StepDistribution,
    model: &SceneryModel,
    tail: &TailFamily,
    n: u64,
    ks: &[u64],
    k_n: u64,
    replicas: u64,
    rule: ThresholdRule,
    q_hat: &Estimate,
    master_seed: u64,
) -> Result<Vec<MixingSumReport>> {
    let r = block_size(n, k_n)?;
    ks.iter()
        .filter(|&&k| k < r)
        .map(|&k| dinfty_sum(dist, model, tail, n, k, k_n, replicas, rule, q_hat, master_seed))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::floor_pow;

    fn frechet() -> TailFamily {
        TailFamily::frechet(2.0).unwrap()
    }

    fn tau1() -> ThresholdRule {
        ThresholdRule::Norming { tau: 1.0 }
    }

    #[test]
    fn pair_sum_hand_example() {
        // Positions 0, 1, 0, 2 with k = 1, r = 3: bases s = 0, 1.
        // s = 0: a = 0, b in {1, 0} -> p^2 + p.  s = 1: a = 1, b in {0, 2} -> 2 p^2.
        let p = 0.1;
        let got = conditional_pair_sum(&[0, 1, 0, 2], 1, 3, p);
        assert!((got - (3.0 * p * p + p)).abs() < 1e-15);
        // k = 2: s = 0: gap {1}, b = 0 = a -> p (1-p);  s = 1: gap {0}, b = 2 -> p (1-p) p.
        let got = conditional_pair_sum(&[0, 1, 0, 2], 2, 3, p);
        assert!((got - p * (1.0 - p) * (1.0 + p)).abs() < 1e-15);
        // A return inside the gap kills the base.
        assert_eq!(conditional_pair_sum(&[5, 5, 7], 2, 3, p), 0.0);
        let flags = [true, false, true, true];
        assert_eq!(frequency_pair_sum(&flags, 1, 3), 1.0);
    }

    #[test]
    fn scenery_sum_above_support_is_zero() {
        let tail = TailFamily::weibull(1.0).unwrap();
        let r = dprime_sum_scenery(&SceneryModel::iid(tail), &tail, 1000, 63, 20, ThresholdRule::Fixed(0.0), 1)
            .unwrap();
        assert_eq!(r.estimate.value, 0.0);
        let dist = StepDistribution::symmetric_zeta(0.5).unwrap();
        let q = Estimate::exact(0.8);
        let w = dprime_sum_rwrs(&dist, &SceneryModel::iid(tail), &tail, 1000, 63, 20, ThresholdRule::Fixed(0.0), &q, 1)
            .unwrap();
        assert_eq!(w.estimate.value, 0.0);
        let d = dinfty_sum(&dist, &SceneryModel::iid(tail), &tail, 1000, 4, 63, 20, ThresholdRule::Fixed(0.0), &q, 1)
            .unwrap();
        assert_eq!(d.estimate.value, 0.0);
    }

    #[test]
    fn iid_scenery_sum_matches_closed_form() {
        let n = 1000;
        let k_n = floor_pow(n, 0.6);
        let r = dprime_sum_scenery(&SceneryModel::iid(frechet()), &frechet(), n, k_n, 20_000, tau1(), 2).unwrap();
        let cf = r.closed_form.unwrap();
        assert!((cf - 15.0 / 1000.0).abs() < 1e-12);
        assert!(r.estimate.within(cf, 0.0, 3.0), "{:?} vs {cf}", r.estimate);
    }

    #[test]
    fn standard_error_shrinks_with_replicas() {
        let model = SceneryModel::moving_max(2, frechet()).unwrap();
        let a = dprime_sum_scenery(&model, &frechet(), 1000, 63, 2000, tau1(), 3).unwrap();
        let b = dprime_sum_scenery(&model, &frechet(), 1000, 63, 8000, tau1(), 3).unwrap();
        let ratio = a.estimate.se / b.estimate.se;
        assert!((ratio - 2.0).abs() < 0.4, "{ratio}");
    }

    #[test]
    fn moving_max_sum_stays_positive() {
        // Oracle: P(xi(0) > u, xi(1) > u) >= P(eta_1 > u) = 1 - (1 - p)^(1/2),
        // so the sum is at least n (1 - (1 - 1/n)^(1/2)) ~ tau / 2.
        let model = SceneryModel::moving_max(2, frechet()).unwrap();
        for n in [1000u64, 10_000] {
            let r = dprime_sum_scenery(&model, &frechet(), n, floor_pow(n, 0.6), 2000, tau1(), 4).unwrap();
            let p = 1.0 / n as f64;
            let lower = n as f64 * (1.0 - (1.0 - p).sqrt());
            assert!(r.estimate.value > lower - 3.0 * r.estimate.se, "{r:?}");
            assert!(r.estimate.value > 0.3);
        }
    }

    #[test]
    fn drift_walk_reduces_to_the_scenery_case() {
        let dist = StepDistribution::drift();
        let n = 1000;
        let r = dprime_sum_rwrs(&dist, &SceneryModel::iid(frechet()), &frechet(), n, 63, 10, tau1(), &Estimate::exact(1.0), 5)
            .unwrap();
        // No returns: every pair is at distinct sites, n (r - 1) p^2 exactly.
        let p = r.tail_prob;
        assert!((r.estimate.value - n as f64 * 14.0 * p * p).abs() < 1e-12);
        assert_eq!(r.estimate.se, 0.0);
        assert_eq!(r.reference_bound, Some(0.0));
    }

    #[test]
    fn k_one_equals_dprime_bit_for_bit() {
        let dist = StepDistribution::symmetric_zeta(0.5).unwrap();
        let q = Estimate::new(0.796, 0.001);
        for model in [SceneryModel::iid(frechet()), SceneryModel::moving_max(2, frechet()).unwrap()] {
            let a = dprime_sum_rwrs(&dist, &model, &frechet(), 1000, 63, 200, tau1(), &q, 6).unwrap();
            let b = dinfty_sum(&dist, &model, &frechet(), 1000, 1, 63, 200, tau1(), &q, 6).unwrap();
            assert_eq!(a.estimate.value.to_bits(), b.estimate.value.to_bits());
            assert_eq!(a.estimate.se.to_bits(), b.estimate.se.to_bits());
        }
    }

    #[test]
    fn frequency_and_conditional_modes_agree() {
        let dist = StepDistribution::symmetric_zeta(0.5).unwrap();
        let q = Estimate::exact(0.796);
        let iid = SceneryModel::iid(frechet());
        let one = SceneryModel::moving_max(1, frechet()).unwrap();
        let n = 1000;
        let c = dprime_sum_rwrs(&dist, &iid, &frechet(), n, 63, 3000, tau1(), &q, 7).unwrap();
        let f = dprime_sum_rwrs(&dist, &one, &frechet(), n, 63, 3000, tau1(), &q, 7).unwrap();
        assert_eq!(c.mode, SumMode::Conditional);
        assert_eq!(f.mode, SumMode::Frequency);
        assert!(f.estimate.within(c.estimate.value, c.estimate.se, 3.0), "{:?} {:?}", f.estimate, c.estimate);
    }

    #[test]
    fn dinfty_decreases_in_k() {
        let dist = StepDistribution::symmetric_zeta(0.5).unwrap();
        let q = Estimate::exact(0.796);
        let table =
            dinfty_table(&dist, &SceneryModel::iid(frechet()), &frechet(), 1000, &DINFTY_KS, 63, 300, tau1(), &q, 8)
                .unwrap();
        assert_eq!(table.len(), 4); // k = 16 >= r_n = 15 is skipped.
        for w in table.windows(2) {
            assert!(w[1].estimate.value <= w[0].estimate.value, "{table:?}");
        }
        let err = dinfty_sum(&dist, &SceneryModel::iid(frechet()), &frechet(), 1000, 15, 63, 10, tau1(), &q, 8);
        assert!(matches!(err, Err(Error::Scheme(_))));
    }
}

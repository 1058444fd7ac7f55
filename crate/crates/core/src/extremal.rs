//! Block and stripe partitions of the visited sites, running maxima, and the
//! extremal-index estimators: the block-leader sum approximating
//! `P(M_{S_n} <= u_n)`, the normalized conditional sum `mu'(u_n)`, and
//! O'Brien's conditional probability for a plain scenery.

use std::fmt;

use rayon::prelude::*;
use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::exceedance::scenery_seed;
use crate::rng::{self, ReplicaRng, Stream};
use crate::scenery::{threshold, SceneryModel, TailFamily};
use crate::stats::{self, floor_pow, Estimate};
use crate::walk::{self, Discoveries, Regime, StepDistribution, WalkPath};

/// Block partition parameters: `k_n` blocks of `r_n = floor(n / k_n)` sites
/// with stripes of width `l_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockScheme {
    pub n: u64,
    pub k_n: u64,
    pub l_n: u64,
    pub r_n: u64,
}

impl BlockScheme {
    pub fn new(n: u64, k_n: u64, l_n: u64) -> Result<Self> {
        if k_n == 0 || k_n > n {
            return Err(Error::Scheme(format!("k_n = {k_n} must lie in [1, n = {n}]")));
        }
        Ok(Self { n, k_n, l_n, r_n: n / k_n })
    }

    /// `k_n = floor(n^0.6)`, `l_n = floor(n^0.2)`.
    pub fn default_for(n: u64) -> Result<Self> {
        Self::new(n, floor_pow(n, 0.6).max(1), floor_pow(n, 0.2))
    }

    /// Number of blocks of the realized partition of `range` sites.
    pub fn block_count(&self, range: u64) -> u64 {
        range.div_ceil(self.r_n)
    }

    fn check(&self) -> Result<()> {
        if self.l_n >= self.r_n {
            return Err(Error::Scheme(format!("stripe width l_n = {} must be below r_n = {}", self.l_n, self.r_n)));
        }
        Ok(())
    }
}

impl fmt::Display for BlockScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k_n={} l_n={} r_n={}", self.k_n, self.l_n, self.r_n)
    }
}

/// One block as index ranges into the ordered sites. The stripe is the top
/// `l_n` indices of the block, empty for a final block shorter than `l_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub sites: std::ops::Range<usize>,
    pub stripe: std::ops::Range<usize>,
}

/// `S_(1) < ... < S_(R_n)`.
pub fn order_visited_sites(path: &WalkPath) -> Vec<i64> {
    order_sites(&path.discovered_sites)
}

pub fn order_sites(sites: &[i64]) -> Vec<i64> {
    let mut v = sites.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Consecutive blocks of `r_n` ordered sites, the last possibly short.
pub fn make_blocks(ordered: &[i64], scheme: &BlockScheme) -> Result<Vec<Block>> {
    scheme.check()?;
    let r = scheme.r_n as usize;
    let l = scheme.l_n as usize;
    Ok((0..ordered.len())
        .step_by(r)
        .map(|start| {
            let end = (start + r).min(ordered.len());
            let stripe = if end - start < l { end..end } else { end - l..end };
            Block { sites: start..end, stripe }
        })
        .collect())
}

/// Maxima `M_{i,j}` of a sequence over 1-based inclusive index windows;
/// `-inf` when `i > j`.
#[derive(Debug, Clone)]
pub struct MaxStatistics<'a> {
    values: &'a [f64],
}

impl<'a> MaxStatistics<'a> {
    pub fn new(values: &'a [f64]) -> Self {
        Self { values }
    }

    pub fn max(&self, i: usize, j: usize) -> f64 {
        if i > j || i == 0 {
            return f64::NEG_INFINITY;
        }
        let j = j.min(self.values.len());
        self.values[i - 1..j].iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// How the threshold `u_n` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdRule {
    /// `u_n = a_level nu^-1(tau) + b_level`, so `level P(xi > u_n) ~ tau`.
    Norming { tau: f64 },
    Fixed(f64),
}

impl ThresholdRule {
    pub fn resolve(&self, tail: &TailFamily, level: u64) -> Result<f64> {
        match *self {
            Self::Norming { tau } => threshold(tail, level, tau),
            Self::Fixed(u) => Ok(u),
        }
    }

    pub fn tau(&self) -> Option<f64> {
        match *self {
            Self::Norming { tau } => Some(tau),
            Self::Fixed(_) => None,
        }
    }
}

fn require_transient(dist: &StepDistribution) -> Result<()> {
    if dist.regime() != Regime::Transient {
        return Err(Error::Regime(format!("this estimator needs a transient walk (alpha < 1), got {dist}")));
    }
    Ok(())
}

fn require_replicas(replicas: u64) -> Result<()> {
    if replicas < 2 {
        return Err(Error::Parameter("at least 2 replicas are needed".into()));
    }
    Ok(())
}

/// Number of `(j, i)` with `xi(S_((j-1)r+i)) > u >= M'` over the rest of
/// block `j`, i.e. the number of blocks with an exceedance.
pub fn block_leader_count(flags_in_site_order: &[bool], blocks: &[Block]) -> u64 {
    let mut count = 0;
    for b in blocks {
        let mut rest_exceeds = false;
        for i in b.sites.clone().rev() {
            if flags_in_site_order[i] && !rest_exceeds {
                count += 1;
            }
            rest_exceeds |= flags_in_site_order[i];
        }
    }
    count
}

/// Exceedance flags of a scenery at the ordered visited sites.
fn ordered_flags(model: &SceneryModel, d: &Discoveries, u: f64, seed: u64) -> Result<(Vec<i64>, Vec<bool>)> {
    let ordered = order_sites(&d.sites);
    let flags = model.exceedances(&ordered, u, seed)?;
    Ok((ordered, flags))
}

/// Estimates of `mu'(u_n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuPrime {
    /// `E[#block leaders] / (n P(xi > u_n))`.
    pub mu_prime: Estimate,
    /// `mu' * n P(xi > u_n) / tau`, equal to `mu'` when `n P(xi > u_n) = tau`.
    pub rescaled: Estimate,
    pub threshold: f64,
    pub tail_prob: f64,
    /// Replica mean of the block-leader count.
    pub leaders: Estimate,
}

/// Estimates `mu'(u_n)` with `u_n` resolved at level `n`; the conditional
/// probabilities are estimated in ratio form with the analytic denominator
/// `P(xi > u_n)`.
#[allow(clippy::too_many_arguments)]
pub fn mu_prime(
    dist: &StepDistribution,
    model: &SceneryModel,
    tail: &TailFamily,
    n: u64,
    scheme: &BlockScheme,
    replicas: u64,
    rule: ThresholdRule,
    master_seed: u64,
) -> Result<MuPrime> {
    require_transient(dist)?;
    require_replicas(replicas)?;
    scheme.check()?;
    let u = rule.resolve(tail, n)?;
    let p = tail.survival(u);
    let counts: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map_init(FxHashSet::default, |scratch, r| {
            let mut rng = walk::walk_rng(master_seed, r);
            let d = walk::walk_discoveries(dist, n, &mut rng, scratch);
            let (ordered, flags) = ordered_flags(model, &d, u, scenery_seed(master_seed, r))?;
            let blocks = make_blocks(&ordered, scheme)?;
            Ok(block_leader_count(&flags, &blocks) as f64)
        })
        .collect::<Result<_>>()?;
    let leaders = stats::mean_se(&counts);
    let denom = n as f64 * p;
    if denom == 0.0 || leaders.value == 0.0 {
        return Ok(MuPrime {
            mu_prime: Estimate::undefined(),
            rescaled: Estimate::undefined(),
            threshold: u,
            tail_prob: p,
            leaders,
        });
    }
    let mu = Estimate::new(leaders.value / denom, leaders.se / denom);
    let rescaled = match rule.tau() {
        Some(tau) => Estimate::new(leaders.value / tau, leaders.se / tau),
        None => mu,
    };
    Ok(MuPrime { mu_prime: mu, rescaled, threshold: u, tail_prob: p, leaders })
}

/// O'Brien's characterization on a plain scenery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObrienReport {
    /// `P(M_{2,r_n} <= u_n | xi(1) > u_n)`.
    pub theta: Estimate,
    /// `P(M_n <= u_n)`.
    pub max_below: Estimate,
    /// `exp(-n P(xi(1) > u_n >= M_{2,r_n}))`.
    pub exp_term: Estimate,
    pub threshold: f64,
}

/// Estimates O'Brien's `theta` with `u_n` resolved at level `n`. Each
/// replica is a scenery window of `n + r_n - 1` sites; by stationarity every
/// base site `1..=n` contributes a conditioning event.
#[allow(clippy::too_many_arguments)]
pub fn obrien_theta(
    model: &SceneryModel,
    tail: &TailFamily,
    n: u64,
    scheme: &BlockScheme,
    replicas: u64,
    rule: ThresholdRule,
    master_seed: u64,
) -> Result<ObrienReport> {
    require_replicas(replicas)?;
    let u = rule.resolve(tail, n)?;
    let r = scheme.r_n as usize;
    let n_us = n as usize;
    let rows: Vec<(f64, f64, bool)> = (0..replicas)
        .into_par_iter()
        .map(|rep| {
            let flags = model.exceedances_on_range(1, n_us + r - 1, u, scenery_seed(master_seed, rep))?;
            // Index of the next exceedance to the right, scanning right to left.
            let mut next = usize::MAX;
            let (mut lead, mut isolated) = (0u64, 0u64);
            let mut next_after = vec![usize::MAX; n_us];
            for s in (0..flags.len()).rev() {
                if s < n_us {
                    next_after[s] = next;
                }
                if flags[s] {
                    next = s;
                }
            }
            for s in 0..n_us {
                if flags[s] {
                    lead += 1;
                    // M_{s+2, s+r} <= u: no exceedance within r - 1 sites.
                    if next_after[s] == usize::MAX || next_after[s] - s >= r {
                        isolated += 1;
                    }
                }
            }
            let max_below = !flags[..n_us].iter().any(|&f| f);
            Ok((isolated as f64, lead as f64, max_below))
        })
        .collect::<Result<_>>()?;
    let isolated: Vec<f64> = rows.iter().map(|x| x.0).collect();
    let leads: Vec<f64> = rows.iter().map(|x| x.1).collect();
    let below = rows.iter().filter(|x| x.2).count() as u64;
    let theta = stats::ratio_se(&isolated, &leads);
    let c = stats::mean_se(&isolated);
    let e = (-c.value).exp();
    Ok(ObrienReport {
        theta,
        max_below: stats::proportion(below, replicas),
        exp_term: Estimate::new(e, e * c.se),
        threshold: u,
    })
}

/// How the two terms of the block-approximation gap are estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapMode {
    /// Given each walk, the probabilities are computed exactly for an i.i.d.
    /// scenery: `P(M <= u | walk) = (1 - p)^R_n` and
    /// `P(M_{B_j} > u | walk) = 1 - (1 - p)^|B_j|`.
    Conditional,
    /// Scenery drawn per replica; both terms by frequency.
    Frequency,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    /// `P(M_{S_n} <= u_n)`.
    pub max_below: Estimate,
    /// Replica mean of the block-leader exceedance count.
    pub leader_sum: Estimate,
    /// `|max_below - exp(-leader_sum)|`.
    pub gap: Estimate,
    pub threshold: f64,
    pub mode: GapMode,
}

/// Rng of the secondary walk stream, independent of the primary one.
fn secondary_walk_rng(master_seed: u64, replica: u64) -> ReplicaRng {
    rng::rng_from_seed(rng::derive(rng::replica_seed(master_seed, replica), Stream::Secondary))
}

/// The block-approximation gap `|P(M_{S_n} <= u_n) - exp(-S)|` with `u_n` resolved at
/// level `n`. The two terms come from independent walk streams; an i.i.d.
/// scenery uses [`GapMode::Conditional`], any other [`GapMode::Frequency`].
#[allow(clippy::too_many_arguments)]
pub fn theorem6_gap(
    dist: &StepDistribution,
    model: &SceneryModel,
    tail: &TailFamily,
    n: u64,
    scheme: &BlockScheme,
    replicas: u64,
    rule: ThresholdRule,
    master_seed: u64,
) -> Result<GapReport> {
    require_transient(dist)?;
    require_replicas(replicas)?;
    scheme.check()?;
    let u = rule.resolve(tail, n)?;
    let mode = if model.is_iid() { GapMode::Conditional } else { GapMode::Frequency };
    let p = tail.survival(u);
    let log_keep = (-p).ln_1p();
    let keep = |size: u64| if p >= 1.0 { 0.0 } else { (log_keep * size as f64).exp() };
    let rows: Vec<(f64, f64)> = (0..replicas)
        .into_par_iter()
        .map_init(FxHashSet::default, |scratch, r| {
            let mut rng = walk::walk_rng(master_seed, r);
            let d = walk::walk_discoveries(dist, n, &mut rng, scratch);
            let below = match mode {
                GapMode::Conditional => keep(d.range()),
                GapMode::Frequency => {
                    let flags = model.exceedances(&d.sites, u, scenery_seed(master_seed, r))?;
                    (!flags.iter().any(|&f| f)) as u64 as f64
                }
            };
            let mut rng = secondary_walk_rng(master_seed, r);
            let d = walk::walk_discoveries(dist, n, &mut rng, scratch);
            let ordered = order_sites(&d.sites);
            let blocks = make_blocks(&ordered, scheme)?;
            let leaders = match mode {
                GapMode::Conditional => blocks.iter().map(|b| 1.0 - keep(b.sites.len() as u64)).sum(),
                GapMode::Frequency => {
                    let seed = rng::derive(rng::replica_seed(master_seed, r), Stream::Secondary);
                    let flags = model.exceedances(&ordered, u, rng::derive(seed, Stream::Scenery))?;
                    block_leader_count(&flags, &blocks) as f64
                }
            };
            Ok((below, leaders))
        })
        .collect::<Result<_>>()?;
    let max_below = stats::mean_se(&rows.iter().map(|x| x.0).collect::<Vec<_>>());
    let leader_sum = stats::mean_se(&rows.iter().map(|x| x.1).collect::<Vec<_>>());
    let e = (-leader_sum.value).exp();
    let gap_se = (max_below.se * max_below.se + e * e * leader_sum.se * leader_sum.se).sqrt();
    Ok(GapReport {
        max_below,
        leader_sum,
        gap: Estimate::new((max_below.value - e).abs(), gap_se),
        threshold: u,
        mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_scheme_values() {
        let s = BlockScheme::default_for(10_000).unwrap();
        assert_eq!((s.k_n, s.l_n, s.r_n), (251, 6, 39));
        let s = BlockScheme::default_for(1000).unwrap();
        assert_eq!((s.k_n, s.l_n, s.r_n), (63, 3, 15));
        let s = BlockScheme::default_for(100_000).unwrap();
        assert_eq!(s.r_n, 100);
    }

    #[test]
    fn ordering_examples() {
        assert_eq!(order_sites(&[2, -1, 3]), vec![-1, 2, 3]);
        assert_eq!(order_sites(&[7]), vec![7]);
    }

    #[test]
    fn ordering_matches_sorted_positions() {
        let dist = StepDistribution::symmetric_zeta(0.7).unwrap();
        for seed in 0..20 {
            let path = walk::sample_walk(&dist, 1000, seed).unwrap();
            let mut oracle: Vec<i64> = path.positions.clone();
            oracle.sort();
            oracle.dedup();
            assert_eq!(order_visited_sites(&path), oracle);
        }
    }

    #[test]
    fn block_examples() {
        let sites: Vec<i64> = (0..10).collect();
        let scheme = BlockScheme { n: 40, k_n: 10, l_n: 1, r_n: 4 };
        let blocks = make_blocks(&sites, &scheme).unwrap();
        let sizes: Vec<usize> = blocks.iter().map(|b| b.sites.len()).collect();
        assert_eq!(sizes, vec![4, 4, 2]);
        let stripes: Vec<_> = blocks.iter().map(|b| b.stripe.clone()).collect();
        assert_eq!(stripes, vec![3..4, 7..8, 9..10]);
        assert_eq!(blocks.len() as u64, scheme.block_count(10));

        let wide = BlockScheme { n: 40, k_n: 2, l_n: 1, r_n: 20 };
        assert_eq!(make_blocks(&sites, &wide).unwrap().len(), 1);

        // A final block shorter than the stripe has an empty stripe.
        let s = BlockScheme { n: 40, k_n: 10, l_n: 3, r_n: 4 };
        let b = make_blocks(&sites, &s).unwrap();
        assert!(b[2].stripe.is_empty());

        let bad = BlockScheme { n: 40, k_n: 10, l_n: 4, r_n: 4 };
        assert!(matches!(make_blocks(&sites, &bad), Err(Error::Scheme(_))));
    }

    #[test]
    fn max_statistics_conventions() {
        let v = [1.0, 5.0, 2.0];
        let m = MaxStatistics::new(&v);
        assert_eq!(m.max(1, 3), 5.0);
        assert_eq!(m.max(3, 3), 2.0);
        assert_eq!(m.max(3, 2), f64::NEG_INFINITY);
        assert!(m.max(1, 1) <= m.max(1, 2));
    }

    #[test]
    fn leaders_count_blocks_with_exceedances() {
        let blocks = vec![Block { sites: 0..3, stripe: 2..3 }, Block { sites: 3..6, stripe: 5..6 }];
        assert_eq!(block_leader_count(&[true, false, true, false, false, false], &blocks), 1);
        // Every block has exactly one exceedance at its last site.
        assert_eq!(block_leader_count(&[false, false, true, false, false, true], &blocks), 2);
        assert_eq!(block_leader_count(&[false; 6], &blocks), 0);
    }

    #[test]
    fn mu_prime_undefined_above_support() {
        let dist = StepDistribution::symmetric_zeta(0.5).unwrap();
        let tail = TailFamily::weibull(1.0).unwrap();
        let model = SceneryModel::iid(tail);
        let scheme = BlockScheme::default_for(1000).unwrap();
        let r = mu_prime(&dist, &model, &tail, 1000, &scheme, 50, ThresholdRule::Fixed(0.5), 1).unwrap();
        assert!(!r.mu_prime.is_defined());
        assert_eq!(r.leaders.value, 0.0);
    }

    #[test]
    fn mu_prime_rejects_recurrent_walks() {
        let dist = StepDistribution::simple_lazy(0.5).unwrap();
        let tail = TailFamily::frechet(2.0).unwrap();
        let scheme = BlockScheme::default_for(1000).unwrap();
        let r = mu_prime(&dist, &SceneryModel::iid(tail), &tail, 1000, &scheme, 50, ThresholdRule::Norming { tau: 1.0 }, 1);
        assert!(matches!(r, Err(Error::Regime(_))));
    }

    #[test]
    fn obrien_iid_is_near_one() {
        let tail = TailFamily::frechet(2.0).unwrap();
        let n = 10_000;
        let scheme = BlockScheme::default_for(n).unwrap();
        let rule = ThresholdRule::Norming { tau: 1.0 };
        let rep = obrien_theta(&SceneryModel::iid(tail), &tail, n, &scheme, 2000, rule, 3).unwrap();
        // Oracle for iid: P(M_{2,r} <= u) = (1 - p)^(r - 1).
        let p = tail.survival(rule.resolve(&tail, n).unwrap());
        let oracle = (1.0 - p).powi(scheme.r_n as i32 - 1);
        assert!(rep.theta.within(oracle, 0.0, 3.0), "{:?} vs {oracle}", rep.theta);
        assert!(rep.theta.within(1.0, 0.0, 3.0));
        // Both sides of the O'Brien identity.
        assert!(rep.max_below.within(rep.exp_term.value, rep.exp_term.se, 3.0), "{rep:?}");
    }

    #[test]
    fn obrien_moving_max_clusters() {
        let tail = TailFamily::frechet(2.0).unwrap();
        let n = 10_000;
        let scheme = BlockScheme::default_for(n).unwrap();
        let model = SceneryModel::moving_max(2, tail).unwrap();
        let rule = ThresholdRule::Norming { tau: 1.0 };
        let rep = obrien_theta(&model, &tail, n, &scheme, 2000, rule, 4).unwrap();
        // Oracle on the latent sequence: eta has survival w = 1 - (1 - p)^(1/2).
        // Given xi(1) > u, the next r - 1 values stay below u iff no latent
        // value exceeds in positions 2..r+1 and xi(1)'s exceedance came from
        // eta_1 alone.
        let p = tail.survival(rule.resolve(&tail, n).unwrap());
        let w = 1.0 - (1.0 - p).sqrt();
        let r = scheme.r_n as i32;
        let oracle = w * (1.0 - w) * (1.0 - w).powi(r - 1) / p;
        assert!(rep.theta.within(oracle, 0.0, 3.0), "{:?} vs {oracle}", rep.theta);
        assert!(rep.theta.value < 0.6);
    }

    #[test]
    fn obrien_below_support_is_zero() {
        let tail = TailFamily::frechet(2.0).unwrap();
        let scheme = BlockScheme::default_for(1000).unwrap();
        let rep = obrien_theta(&SceneryModel::iid(tail), &tail, 1000, &scheme, 10, ThresholdRule::Fixed(0.5), 1).unwrap();
        assert_eq!(rep.theta.value, 0.0);
    }

    #[test]
    fn gap_trivial_thresholds() {
        let dist = StepDistribution::symmetric_zeta(0.5).unwrap();
        let tail = TailFamily::weibull(1.0).unwrap();
        let model = SceneryModel::iid(tail);
        let n = 1000;
        let scheme = BlockScheme::default_for(n).unwrap();
        let above = theorem6_gap(&dist, &model, &tail, n, &scheme, 20, ThresholdRule::Fixed(0.0), 1).unwrap();
        assert_eq!(above.gap.value, 0.0);
        assert_eq!(above.max_below.value, 1.0);
        let below = theorem6_gap(&dist, &model, &tail, n, &scheme, 20, ThresholdRule::Fixed(-2.0), 1).unwrap();
        assert_eq!(below.max_below.value, 0.0);
        assert!(below.gap.value < 1e-10);
    }

    #[test]
    fn gap_modes_agree_on_iid_scenery() {
        // The frequency mode estimates the same two terms as the conditional
        // mode; drive it with a one-site moving maximum, which is i.i.d.
        let dist = StepDistribution::symmetric_zeta(0.5).unwrap();
        let tail = TailFamily::frechet(2.0).unwrap();
        let n = 1000;
        let scheme = BlockScheme::default_for(n).unwrap();
        let rule = ThresholdRule::Norming { tau: 1.0 };
        let c = theorem6_gap(&dist, &SceneryModel::iid(tail), &tail, n, &scheme, 4000, rule, 2).unwrap();
        let f = theorem6_gap(&dist, &SceneryModel::moving_max(1, tail).unwrap(), &tail, n, &scheme, 4000, rule, 2)
            .unwrap();
        assert_eq!(c.mode, GapMode::Conditional);
        assert_eq!(f.mode, GapMode::Frequency);
        assert!(f.max_below.within(c.max_below.value, c.max_below.se, 3.0));
        assert!(f.leader_sum.within(c.leader_sum.value, c.leader_sum.se, 3.0));
    }

    proptest! {
        #[test]
        fn blocks_partition_the_sites(len in 1usize..200, r in 2u64..30, l_frac in 0.0f64..1.0) {
            let sites: Vec<i64> = (0..len as i64).map(|x| 3 * x - 50).collect();
            let l = ((r - 1) as f64 * l_frac) as u64;
            let scheme = BlockScheme { n: 1000, k_n: 1000 / r, l_n: l, r_n: r };
            let blocks = make_blocks(&sites, &scheme).unwrap();
            let mut covered = 0;
            for (j, b) in blocks.iter().enumerate() {
                prop_assert_eq!(b.sites.start, covered);
                covered = b.sites.end;
                prop_assert!(b.stripe.start >= b.sites.start && b.stripe.end <= b.sites.end);
                if j + 1 < blocks.len() {
                    prop_assert_eq!(b.sites.len() as u64, r);
                    prop_assert!(sites[b.sites.end - 1] < sites[b.sites.end]);
                }
            }
            prop_assert_eq!(covered, len);
            prop_assert_eq!(blocks.len() as u64, scheme.block_count(len as u64));
        }
    }
}

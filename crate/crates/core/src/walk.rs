//! Integer-valued random walks in the domain of attraction of stable laws,
//! their range process and discovery times.
//!
//! Three step families are provided:
//!
//! * symmetric zeta: `P(X = k) = P(X = -k) = c |k|^-(1+alpha) / 2`, `k != 0`,
//!   for `alpha` in (0, 2). Transient for `alpha < 1`, recurrent for
//!   `alpha > 1`, the boundary case at `alpha = 1`.
//! * simple lazy: steps in {-1, 0, +1} with `P(0) = p0`; the `alpha = 2`
//!   representative.
//! * drift: every step is +1. A degenerate walk that never returns, used to
//!   exercise code paths with known answers.

use std::fmt;
use std::sync::Arc;

use rand::RngCore;
use rayon::prelude::*;
use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::rng::{self, half_open_unit, open_unit, ReplicaRng, Stream};
use crate::stats::{self, Estimate};

/// Number of exact entries in the zeta inversion table; larger magnitudes
/// come from the rejection tail sampler.
const ZETA_TABLE_LEN: usize = 1 << 16;
const ZETA_GUIDE_LEN: usize = 1 << 12;
/// Step magnitudes are capped here; positions use wrapping arithmetic.
const MAX_STEP: u64 = 1 << 62;

/// Which limit theorem governs the walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `alpha < 1`: the range grows linearly, `R_n / n -> q`.
    Transient,
    /// `alpha = 1`: `h(n) R_n / n -> 1`.
    Boundary,
    /// `1 < alpha <= 2`: `R_n / n^(1/alpha)` converges to the Lebesgue measure
    /// of the range of the stable process.
    Recurrent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepFamily {
    SymmetricZeta,
    SimpleLazy,
    Drift,
}

/// Inversion table for `|X|` under the zeta law with exponent `s = 1 + alpha`.
#[derive(Debug)]
struct ZetaTable {
    alpha: f64,
    s: f64,
    /// `cdf[k-1] = P(|X| <= k)` for `k <= ZETA_TABLE_LEN`.
    cdf: Vec<f64>,
    guide: Vec<u32>,
    body_mass: f64,
    norm: f64,
    /// Rejection constant `(1 + 1/(K+1))^s` of the tail sampler.
    tail_bound: f64,
}

/// `sum_{k > K} k^-s` by Euler-Maclaurin at `a = K + 1`.
fn zeta_tail_sum(k: usize, s: f64) -> f64 {
    let a = (k + 1) as f64;
    a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s) + s * a.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * a.powf(-s - 3.0) / 720.0
}

impl ZetaTable {
    fn new(alpha: f64) -> Self {
        let s = 1.0 + alpha;
        let weights: Vec<f64> = (1..=ZETA_TABLE_LEN).map(|k| (k as f64).powf(-s)).collect();
        let tail = zeta_tail_sum(ZETA_TABLE_LEN, s);
        let norm = weights.iter().rev().sum::<f64>() + tail;
        let mut cdf = Vec::with_capacity(ZETA_TABLE_LEN);
        let mut acc = 0.0;
        for w in &weights {
            acc += w;
            cdf.push(acc / norm);
        }
        let body_mass = cdf[ZETA_TABLE_LEN - 1];
        let mut guide = Vec::with_capacity(ZETA_GUIDE_LEN + 1);
        let mut idx = 0usize;
        for g in 0..=ZETA_GUIDE_LEN {
            let level = g as f64 / ZETA_GUIDE_LEN as f64;
            while idx < ZETA_TABLE_LEN - 1 && cdf[idx] <= level {
                idx += 1;
            }
            guide.push(idx as u32);
        }
        let tail_bound = (1.0 + 1.0 / (ZETA_TABLE_LEN + 1) as f64).powf(s);
        Self { alpha, s, cdf, guide, body_mass, norm, tail_bound }
    }

    #[inline]
    fn sample_magnitude(&self, word: u64, rng: &mut ReplicaRng) -> u64 {
        let u = half_open_unit(word);
        if u < self.body_mass {
            let g = (u * ZETA_GUIDE_LEN as f64) as usize;
            let lo = self.guide[g] as usize;
            let hi = self.guide[g + 1] as usize;
            let idx = lo + self.cdf[lo..=hi].partition_point(|&c| c <= u);
            (idx.min(ZETA_TABLE_LEN - 1) + 1) as u64
        } else {
            self.sample_tail(rng)
        }
    }

    /// Exact draw of `|X|` conditioned on `|X| > K`: propose `floor(Y)` with
    /// `Y` Pareto on `[K+1, inf)` of density proportional to `y^-s`, accept
    /// with probability `k^-s / (C * int_k^{k+1} y^-s dy)`.
    fn sample_tail(&self, rng: &mut ReplicaRng) -> u64 {
        let start = (ZETA_TABLE_LEN + 1) as f64;
        loop {
            let v = open_unit(rng.next_u64());
            let y = start * v.powf(-1.0 / self.alpha);
            let k = if y >= MAX_STEP as f64 { MAX_STEP } else { y as u64 };
            let kf = k as f64;
            let cell = kf.powf(-self.alpha) * -f64::exp_m1(-self.alpha * (1.0 / kf).ln_1p()) / self.alpha;
            let w = open_unit(rng.next_u64());
            if w * self.tail_bound * cell <= kf.powf(-self.s) {
                return k;
            }
        }
    }
}

#[derive(Debug, Clone)]
enum StepKind {
    Zeta(Arc<ZetaTable>),
    Lazy { p0: f64 },
    Drift,
}

/// Law of the i.i.d. integer steps `X_k`.
#[derive(Debug, Clone)]
pub struct StepDistribution {
    kind: StepKind,
}

impl StepDistribution {
    /// Symmetric zeta steps with stability index `alpha` in (0, 2].
    pub fn symmetric_zeta(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::Parameter(format!("alpha must lie in (0, 2], got {alpha}")));
        }
        Ok(Self { kind: StepKind::Zeta(Arc::new(ZetaTable::new(alpha))) })
    }

    /// Lazy nearest-neighbour steps with holding probability `p0` in [0, 1).
    pub fn simple_lazy(p0: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p0) {
            return Err(Error::Parameter(format!("laziness p0 must lie in [0, 1), got {p0}")));
        }
        Ok(Self { kind: StepKind::Lazy { p0 } })
    }

    /// The deterministic +1 walk.
    pub fn drift() -> Self {
        Self { kind: StepKind::Drift }
    }

    /// Walk family used for a stability index: lazy simple walk (`p0 = 1/2`)
    /// at `alpha = 2`, symmetric zeta otherwise.
    pub fn for_alpha(alpha: f64) -> Result<Self> {
        if alpha == 2.0 {
            Self::simple_lazy(0.5)
        } else {
            Self::symmetric_zeta(alpha)
        }
    }

    pub fn family(&self) -> StepFamily {
        match self.kind {
            StepKind::Zeta(_) => StepFamily::SymmetricZeta,
            StepKind::Lazy { .. } => StepFamily::SimpleLazy,
            StepKind::Drift => StepFamily::Drift,
        }
    }

    /// Stability index; `None` for the drift walk.
    pub fn alpha(&self) -> Option<f64> {
        match &self.kind {
            StepKind::Zeta(t) => Some(t.alpha),
            StepKind::Lazy { .. } => Some(2.0),
            StepKind::Drift => None,
        }
    }

    /// Holding probability of the lazy walk.
    pub fn laziness(&self) -> Option<f64> {
        match self.kind {
            StepKind::Lazy { p0 } => Some(p0),
            _ => None,
        }
    }

    /// Normalizing constant `c = 1 / zeta(1 + alpha)` of the zeta family, so
    /// that `P(|X| = k) = c k^-(1+alpha)`.
    pub fn tail_constant(&self) -> Option<f64> {
        match &self.kind {
            StepKind::Zeta(t) => Some(1.0 / t.norm),
            _ => None,
        }
    }

    pub fn regime(&self) -> Regime {
        match self.alpha() {
            None => Regime::Transient,
            Some(a) if a < 1.0 => Regime::Transient,
            Some(a) if a == 1.0 => Regime::Boundary,
            Some(_) => Regime::Recurrent,
        }
    }

    /// Exact `P(|X| > k)` of the zeta family by direct summation of the
    /// remaining table weights plus the analytic tail.
    pub fn zeta_survival(&self, k: u64) -> Option<f64> {
        match &self.kind {
            StepKind::Zeta(t) => {
                if (k as usize) < ZETA_TABLE_LEN {
                    let rest: f64 = ((k as usize + 1)..=ZETA_TABLE_LEN)
                        .rev()
                        .map(|j| (j as f64).powf(-t.s))
                        .sum();
                    Some((rest + zeta_tail_sum(ZETA_TABLE_LEN, t.s)) / t.norm)
                } else {
                    Some(zeta_tail_sum(k as usize, t.s) / t.norm)
                }
            }
            _ => None,
        }
    }

    /// Single step draws, in the same stream order [`sample_walk`] uses.
    pub fn steps<'a>(&'a self, rng: &'a mut ReplicaRng) -> StepSampler<'a> {
        StepSampler { dist: self, rng, bits: 0, remaining: 0 }
    }
}

impl fmt::Display for StepDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            StepKind::Zeta(t) => write!(f, "zeta:{}", t.alpha),
            StepKind::Lazy { p0 } => write!(f, "lazy:{p0}"),
            StepKind::Drift => write!(f, "drift"),
        }
    }
}

/// Bit-packed encodings of the lazy walk. `p0 = 1/2` uses two bits per step
/// (`step = b0 + b1 - 1`), `p0 = 0` one bit per step (`step = 2b - 1`); both
/// consume words least significant bits first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LazyPacking {
    TwoBit,
    OneBit,
    Generic,
}

fn lazy_packing(p0: f64) -> LazyPacking {
    if p0 == 0.5 {
        LazyPacking::TwoBit
    } else if p0 == 0.0 {
        LazyPacking::OneBit
    } else {
        LazyPacking::Generic
    }
}

/// Iterator-like source of i.i.d. steps.
pub struct StepSampler<'a> {
    dist: &'a StepDistribution,
    rng: &'a mut ReplicaRng,
    bits: u64,
    remaining: u32,
}

impl StepSampler<'_> {
    #[inline]
    pub fn next_step(&mut self) -> i64 {
        match &self.dist.kind {
            StepKind::Zeta(t) => {
                let w = self.rng.next_u64();
                let k = t.sample_magnitude(w, self.rng) as i64;
                if w & 1 == 0 {
                    k
                } else {
                    -k
                }
            }
            StepKind::Lazy { p0 } => match lazy_packing(*p0) {
                LazyPacking::TwoBit => {
                    if self.remaining == 0 {
                        self.bits = self.rng.next_u64();
                        self.remaining = 32;
                    }
                    let b = self.bits & 3;
                    self.bits >>= 2;
                    self.remaining -= 1;
                    ((b & 1) + (b >> 1)) as i64 - 1
                }
                LazyPacking::OneBit => {
                    if self.remaining == 0 {
                        self.bits = self.rng.next_u64();
                        self.remaining = 64;
                    }
                    let b = self.bits & 1;
                    self.bits >>= 1;
                    self.remaining -= 1;
                    2 * b as i64 - 1
                }
                LazyPacking::Generic => {
                    let w = self.rng.next_u64();
                    if half_open_unit(w) < *p0 {
                        0
                    } else if w & 1 == 0 {
                        1
                    } else {
                        -1
                    }
                }
            },
            StepKind::Drift => 1,
        }
    }
}

/// A realized walk `S_1..S_n` with its range process and discoveries.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkPath {
    pub n: u64,
    pub positions: Vec<i64>,
    /// `range[k-1] = R_k = #{S_1, ..., S_k}`.
    pub range: Vec<u64>,
    /// `tau_1 < tau_2 < ...`: 1-based times at which a new site is visited.
    pub discovery_times: Vec<u64>,
    /// `S_{tau_k}`.
    pub discovered_sites: Vec<i64>,
}

impl WalkPath {
    pub fn discoveries(&self) -> Discoveries {
        Discoveries {
            n: self.n,
            times: self.discovery_times.clone(),
            sites: self.discovered_sites.clone(),
        }
    }
}

/// Discovery times and sites of a walk up to horizon `n`; everything the
/// exceedance constructions need, without the position sequence.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Discoveries {
    pub n: u64,
    pub times: Vec<u64>,
    pub sites: Vec<i64>,
}

impl Discoveries {
    /// `R_k`, for `0 <= k <= n`.
    pub fn range_at(&self, k: u64) -> u64 {
        self.times.partition_point(|&t| t <= k) as u64
    }

    pub fn range(&self) -> u64 {
        self.times.len() as u64
    }

    /// `#{k : tau_k in (lo, hi]} = R_hi - R_lo`.
    pub fn count_between(&self, lo: u64, hi: u64) -> u64 {
        self.range_at(hi).saturating_sub(self.range_at(lo))
    }
}

fn check_horizon(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("walk horizon n must be at least 1".into()));
    }
    Ok(())
}

/// Samples `S_1..S_n` from `seed`.
pub fn sample_walk(dist: &StepDistribution, n: u64, seed: u64) -> Result<WalkPath> {
    check_horizon(n)?;
    let mut rng = rng::rng_from_seed(seed);
    let mut steps = dist.steps(&mut rng);
    let mut pos = 0i64;
    let positions: Vec<i64> = (0..n)
        .map(|_| {
            pos = pos.wrapping_add(steps.next_step());
            pos
        })
        .collect();
    let (range, discovery_times, discovered_sites) = range_and_discoveries(&positions);
    Ok(WalkPath { n, positions, range, discovery_times, discovered_sites })
}

/// Range sequence, discovery times (1-based) and discovered sites of a
/// position sequence.
pub fn range_and_discoveries(positions: &[i64]) -> (Vec<u64>, Vec<u64>, Vec<i64>) {
    let mut seen = FxHashSet::default();
    let mut range = Vec::with_capacity(positions.len());
    let mut times = Vec::new();
    let mut sites = Vec::new();
    for (i, &p) in positions.iter().enumerate() {
        if seen.insert(p) {
            times.push(i as u64 + 1);
            sites.push(p);
        }
        range.push(times.len() as u64);
    }
    (range, times, sites)
}

/// Samples only the discoveries of a walk, with the same stream consumption
/// as [`sample_walk`]: `sample_discoveries(d, n, s)` equals
/// `sample_walk(d, n, s)?.discoveries()`.
pub fn sample_discoveries(dist: &StepDistribution, n: u64, seed: u64) -> Result<Discoveries> {
    check_horizon(n)?;
    let mut rng = rng::rng_from_seed(seed);
    let mut scratch = FxHashSet::default();
    Ok(walk_discoveries(dist, n, &mut rng, &mut scratch))
}

/// Discoveries of a fresh walk drawn from `rng`. `scratch` is a reusable
/// visited-set buffer.
pub(crate) fn walk_discoveries(
    dist: &StepDistribution,
    n: u64,
    rng: &mut ReplicaRng,
    scratch: &mut FxHashSet<i64>,
) -> Discoveries {
    match &dist.kind {
        StepKind::Drift => Discoveries {
            n,
            times: (1..=n).collect(),
            sites: (1..=n as i64).collect(),
        },
        StepKind::Lazy { p0 } => match lazy_packing(*p0) {
            LazyPacking::TwoBit => nearest_neighbour_discoveries::<2>(n, rng),
            LazyPacking::OneBit => nearest_neighbour_discoveries::<1>(n, rng),
            LazyPacking::Generic => hashed_discoveries(dist, n, rng, scratch),
        },
        StepKind::Zeta(_) => hashed_discoveries(dist, n, rng, scratch),
    }
}

fn hashed_discoveries(
    dist: &StepDistribution,
    n: u64,
    rng: &mut ReplicaRng,
    seen: &mut FxHashSet<i64>,
) -> Discoveries {
    seen.clear();
    let mut steps = dist.steps(rng);
    let mut pos = 0i64;
    let mut times = Vec::new();
    let mut sites = Vec::new();
    for t in 1..=n {
        pos = pos.wrapping_add(steps.next_step());
        if seen.insert(pos) {
            times.push(t);
            sites.push(pos);
        }
    }
    Discoveries { n, times, sites }
}

/// Per-byte summary of packed nearest-neighbour steps: net displacement and
/// the extreme prefix positions relative to the start of the byte.
struct ByteTable {
    disp: [i8; 256],
    max_prefix: [i8; 256],
    min_prefix: [i8; 256],
}

fn byte_table<const BITS: u32>() -> ByteTable {
    let mut t = ByteTable { disp: [0; 256], max_prefix: [0; 256], min_prefix: [0; 256] };
    for b in 0..256usize {
        let mut pos = 0i8;
        let mut hi = i8::MIN;
        let mut lo = i8::MAX;
        let mut bits = b;
        for _ in 0..(8 / BITS) {
            pos += packed_step::<BITS>(bits as u64) as i8;
            bits >>= BITS;
            hi = hi.max(pos);
            lo = lo.min(pos);
        }
        t.disp[b] = pos;
        t.max_prefix[b] = hi;
        t.min_prefix[b] = lo;
    }
    t
}

#[inline]
fn packed_step<const BITS: u32>(bits: u64) -> i64 {
    if BITS == 2 {
        ((bits & 1) + ((bits >> 1) & 1)) as i64 - 1
    } else {
        2 * (bits & 1) as i64 - 1
    }
}

/// Discoveries of a bit-packed nearest-neighbour walk. The visited set is
/// always the integer interval `[lo, hi]`, so a byte of steps that stays
/// inside it is applied in one table lookup.
fn nearest_neighbour_discoveries<const BITS: u32>(n: u64, rng: &mut ReplicaRng) -> Discoveries {
    let table = byte_table::<BITS>();
    let steps_per_word = 64 / BITS as u64;
    let steps_per_byte = 8 / BITS;
    let mut pos = 0i64;
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    let mut t = 0u64;
    let mut times = Vec::new();
    let mut sites = Vec::new();

    let mut slow = |pos: &mut i64, t: &mut u64, bits: u64, lo: &mut i64, hi: &mut i64| {
        *pos += packed_step::<BITS>(bits);
        *t += 1;
        if *pos > *hi || *pos < *lo {
            times.push(*t);
            sites.push(*pos);
            if *hi < *lo {
                *lo = *pos;
                *hi = *pos;
            } else if *pos > *hi {
                *hi = *pos;
            } else {
                *lo = *pos;
            }
        }
    };

    while t + steps_per_word <= n {
        let mut word = rng.next_u64();
        for _ in 0..8 {
            let b = (word & 0xff) as usize;
            let top = pos + table.max_prefix[b] as i64;
            let bottom = pos + table.min_prefix[b] as i64;
            if top <= hi && bottom >= lo {
                pos += table.disp[b] as i64;
                t += steps_per_byte as u64;
            } else {
                let mut bits = word;
                for _ in 0..steps_per_byte {
                    slow(&mut pos, &mut t, bits, &mut lo, &mut hi);
                    bits >>= BITS;
                }
            }
            word >>= 8;
        }
    }
    if t < n {
        let mut bits = rng.next_u64();
        while t < n {
            slow(&mut pos, &mut t, bits, &mut lo, &mut hi);
            bits >>= BITS;
        }
    }
    Discoveries { n, times, sites }
}

/// Positions `S_1..S_n` of a fresh walk drawn from `rng`; same stream
/// consumption as [`walk_discoveries`].
pub(crate) fn walk_positions(dist: &StepDistribution, n: u64, rng: &mut ReplicaRng) -> Vec<i64> {
    let mut steps = dist.steps(rng);
    let mut pos = 0i64;
    (0..n)
        .map(|_| {
            pos = pos.wrapping_add(steps.next_step());
            pos
        })
        .collect()
}

/// Two estimators of `q = P(S_k != 0 for all k >= 1)` and their agreement.
#[derive(Debug, Clone, PartialEq)]
pub struct QEstimate {
    /// Replica mean of `R_n / n`.
    pub slope: Estimate,
    /// Frequency of walks with `S_k != 0` for all `k <= n`.
    pub no_return: Estimate,
    /// `|slope - no_return|` in units of the combined standard error.
    pub agreement_z: f64,
}

/// Per-replica walk seed.
pub(crate) fn walk_rng(master_seed: u64, replica: u64) -> ReplicaRng {
    rng::rng_from_seed(rng::derive(rng::replica_seed(master_seed, replica), Stream::Walk))
}

/// Estimates `q` in the transient regime.
pub fn estimate_q(dist: &StepDistribution, n: u64, replicas: u64, master_seed: u64) -> Result<QEstimate> {
    if dist.regime() != Regime::Transient {
        return Err(Error::Regime(format!(
            "q is only defined for transient walks (alpha < 1), got {dist}"
        )));
    }
    estimate_q_unchecked(dist, n, replicas, master_seed)
}

pub(crate) fn estimate_q_unchecked(
    dist: &StepDistribution,
    n: u64,
    replicas: u64,
    master_seed: u64,
) -> Result<QEstimate> {
    check_horizon(n)?;
    if replicas < 2 {
        return Err(Error::Parameter("estimate_q needs at least 2 replicas".into()));
    }
    let per_replica: Vec<(f64, bool)> = (0..replicas)
        .into_par_iter()
        .map_init(FxHashSet::default, |scratch, r| {
            let mut rng = walk_rng(master_seed, r);
            let d = walk_discoveries(dist, n, &mut rng, scratch);
            (d.range() as f64 / n as f64, !d.sites.contains(&0))
        })
        .collect();
    let slopes: Vec<f64> = per_replica.iter().map(|p| p.0).collect();
    let escapes = per_replica.iter().filter(|p| p.1).count() as u64;
    let slope = stats::mean_se(&slopes);
    let no_return = stats::proportion(escapes, replicas);
    let combined = (slope.se * slope.se + no_return.se * no_return.se).sqrt();
    let diff = (slope.value - no_return.value).abs();
    let agreement_z = if diff == 0.0 { 0.0 } else { diff / combined };
    Ok(QEstimate { slope, no_return, agreement_z })
}

/// Replica means of `R_{floor(n t)} / n` for each `t` in `fractions`.
pub fn range_fractions(
    dist: &StepDistribution,
    n: u64,
    replicas: u64,
    master_seed: u64,
    fractions: &[f64],
) -> Result<Vec<Estimate>> {
    check_horizon(n)?;
    if let Some(t) = fractions.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::Domain(format!("time fraction {t} outside [0, 1]")));
    }
    let rows: Vec<Vec<f64>> = (0..replicas)
        .into_par_iter()
        .map_init(FxHashSet::default, |scratch, r| {
            let mut rng = walk_rng(master_seed, r);
            let d = walk_discoveries(dist, n, &mut rng, scratch);
            fractions
                .iter()
                .map(|t| d.range_at((n as f64 * t).floor() as u64) as f64 / n as f64)
                .collect()
        })
        .collect();
    Ok((0..fractions.len())
        .map(|i| stats::mean_se(&rows.iter().map(|row| row[i]).collect::<Vec<_>>()))
        .collect())
}

/// `h(n) = 1 + sum_{k=1}^n P(S_k = 0)`, estimated as one plus the replica
/// mean of the number of visits to the origin; the standard error is that of
/// the per-replica visit count, so covariances across `k` are included.
pub fn estimate_h(dist: &StepDistribution, n: u64, replicas: u64, master_seed: u64) -> Result<Estimate> {
    if n == 0 {
        return Ok(Estimate::exact(1.0));
    }
    if replicas < 2 {
        return Err(Error::Parameter("estimate_h needs at least 2 replicas".into()));
    }
    if dist.family() == StepFamily::Drift {
        return Ok(Estimate::exact(1.0));
    }
    let visits: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = walk_rng(master_seed, r);
            let mut steps = dist.steps(&mut rng);
            let mut pos = 0i64;
            let mut count = 0u64;
            for _ in 0..n {
                pos = pos.wrapping_add(steps.next_step());
                count += (pos == 0) as u64;
            }
            count as f64
        })
        .collect();
    let m = stats::mean_se(&visits);
    Ok(Estimate::new(1.0 + m.value, m.se))
}

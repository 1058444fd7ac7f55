//! Rescaled exceedance point patterns: one point
//! `(tau_k / n, (xi(S_{tau_k}) - b_m) / a_m)` per discovered site, with the
//! norming level `m = m(n)` fixed by the walk's regime.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::rng::{self, Stream};
use crate::scenery::{norming_constants, HeightSet, NormingConstants, SampledScenery, SceneryField, SceneryModel, TailFamily};
use crate::stats::{floor_pow, Estimate};
use crate::walk::{self, Discoveries, Regime, StepDistribution, WalkPath};

/// How the norming level `m(n)` grows with the horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeRule {
    /// `m(n) = floor(q n)`.
    Transient { q_hat: Estimate },
    /// `m(n) = floor(n / h(n))`, with `h` estimated at the experiment's `n`.
    Boundary { h_hat: Estimate },
    /// `m(n) = floor(n^(1/alpha))`.
    Recurrent { alpha: f64 },
}

impl RegimeRule {
    pub fn regime(&self) -> Regime {
        match self {
            Self::Transient { .. } => Regime::Transient,
            Self::Boundary { .. } => Regime::Boundary,
            Self::Recurrent { .. } => Regime::Recurrent,
        }
    }

    /// Relative standard error that calibration puts on `m(n)`; zero when
    /// nothing was estimated.
    pub fn scale_relative_se(&self) -> f64 {
        let rel = |e: &Estimate| if e.se.is_finite() { e.se / e.value } else { 0.0 };
        match self {
            Self::Transient { q_hat } => rel(q_hat),
            Self::Boundary { h_hat } => rel(h_hat),
            Self::Recurrent { .. } => 0.0,
        }
    }
}

impl fmt::Display for RegimeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Transient { q_hat } => write!(f, "transient(q={})", q_hat.value),
            Self::Boundary { h_hat } => write!(f, "boundary(h={})", h_hat.value),
            Self::Recurrent { alpha } => write!(f, "recurrent(alpha={alpha})"),
        }
    }
}

/// The norming level `m(n)`.
pub fn m_of_n(regime: &RegimeRule, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Domain("horizon n must be at least 1".into()));
    }
    let m = match *regime {
        RegimeRule::Transient { q_hat } => {
            if !(q_hat.value > 0.0 && q_hat.value <= 1.0) {
                return Err(Error::Parameter(format!("q must lie in (0, 1], got {}", q_hat.value)));
            }
            (q_hat.value * n as f64).floor() as u64
        }
        RegimeRule::Boundary { h_hat } => {
            if !(h_hat.value >= 1.0 && h_hat.value.is_finite()) {
                return Err(Error::Parameter(format!("h(n) must be at least 1, got {}", h_hat.value)));
            }
            (n as f64 / h_hat.value).floor() as u64
        }
        RegimeRule::Recurrent { alpha } => {
            if !(alpha > 1.0 && alpha <= 2.0) {
                return Err(Error::Parameter(format!("recurrent alpha must lie in (1, 2], got {alpha}")));
            }
            floor_pow(n, 1.0 / alpha)
        }
    };
    if m == 0 {
        return Err(Error::DegenerateScale(format!("m(n) = 0 for n = {n} under {regime}")));
    }
    Ok(m)
}

/// Product set `(a, b] x B` of rescaled time and height.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSet {
    pub a: f64,
    pub b: f64,
    pub heights: HeightSet,
}

impl ProductSet {
    pub fn new(a: f64, b: f64, heights: HeightSet) -> Result<Self> {
        if !(a >= 0.0 && a <= b && b.is_finite()) {
            return Err(Error::Domain(format!("malformed time window ({a}, {b}]")));
        }
        Ok(Self { a, b, heights })
    }

    pub fn time_length(&self) -> f64 {
        self.b - self.a
    }

    /// Integer discovery-time bounds `(floor(n a), floor(n b)]`.
    fn time_bounds(&self, n: u64) -> (u64, u64) {
        let nf = n as f64;
        ((nf * self.a).floor() as u64, (nf * self.b).floor() as u64)
    }

    pub fn is_disjoint_from(&self, other: &ProductSet) -> bool {
        self.b <= other.a
            || other.b <= self.a
            || self.heights.intervals().iter().all(|i| {
                other.heights.intervals().iter().all(|j| i.hi <= j.lo || j.hi <= i.lo)
            })
    }
}

impl fmt::Display for ProductSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{}]x{}", self.a, self.b, self.heights)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    /// Discovery time `tau_k`.
    pub time: u64,
    /// `tau_k / n`.
    pub t: f64,
    pub y: f64,
}

/// The pattern `N^(n)` of one walk and scenery realization; one point per
/// discovered site, in discovery order.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPattern {
    pub n: u64,
    pub m: u64,
    pub norming: NormingConstants,
    pub regime: RegimeRule,
    pub points: Vec<Point>,
}

impl PointPattern {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Builds the pattern of `path` over a scenery sampled from `model` with
/// `seed`.
pub fn build_pattern(
    path: &WalkPath,
    model: &SceneryModel,
    tail: &TailFamily,
    regime: &RegimeRule,
    seed: u64,
) -> Result<PointPattern> {
    let field = SampledScenery { model, seed };
    build_pattern_from(&path.discoveries(), &field, tail, regime)
}

/// Builds a pattern from discoveries and any scenery field; the field is
/// queried only at the discovered sites.
pub fn build_pattern_from(
    discoveries: &Discoveries,
    field: &impl SceneryField,
    tail: &TailFamily,
    regime: &RegimeRule,
) -> Result<PointPattern> {
    let n = discoveries.n;
    let m = m_of_n(regime, n)?;
    let norming = norming_constants(tail, m)?;
    let values = field.values_at(&discoveries.sites)?;
    let nf = n as f64;
    let points = discoveries
        .times
        .iter()
        .zip(values)
        .map(|(&time, v)| Point { time, t: time as f64 / nf, y: norming.rescale(v) })
        .collect();
    Ok(PointPattern { n, m, norming, regime: *regime, points })
}

/// Number of points in `(a, b] x B`. Time membership is decided on the
/// integer discovery times, so the count over `(a, b] x E` equals
/// `R_floor(nb) - R_floor(na)`.
pub fn count_in(pattern: &PointPattern, set: &ProductSet) -> u64 {
    let (lo, hi) = set.time_bounds(pattern.n);
    let start = pattern.points.partition_point(|p| p.time <= lo);
    pattern.points[start..]
        .iter()
        .take_while(|p| p.time <= hi)
        .filter(|p| set.heights.contains(p.y))
        .count() as u64
}

pub fn void_in(pattern: &PointPattern, set: &ProductSet) -> bool {
    count_in(pattern, set) == 0
}

/// Writes patterns as CSV with header `replica,t,y`. Numbers use the
/// shortest decimal representation that round-trips.
pub fn write_patterns_csv<'a, W: Write>(
    out: &mut W,
    patterns: impl IntoIterator<Item = (u64, &'a PointPattern)>,
) -> Result<()> {
    writeln!(out, "replica,t,y")?;
    for (replica, pattern) in patterns {
        for p in &pattern.points {
            writeln!(out, "{replica},{},{}", p.t, p.y)?;
        }
    }
    Ok(())
}

/// Seed of the scenery paired with walk replica `replica`.
pub fn scenery_seed(master_seed: u64, replica: u64) -> u64 {
    rng::derive(rng::replica_seed(master_seed, replica), Stream::Scenery)
}

/// Pattern of replica `replica`: walk and scenery drawn from the replica's
/// own streams.
#[allow(clippy::too_many_arguments)]
pub fn replica_pattern(
    dist: &StepDistribution,
    model: &SceneryModel,
    tail: &TailFamily,
    regime: &RegimeRule,
    n: u64,
    master_seed: u64,
    replica: u64,
    scratch: &mut FxHashSet<i64>,
) -> Result<PointPattern> {
    if n == 0 {
        return Err(Error::Domain("horizon n must be at least 1".into()));
    }
    let mut rng = walk::walk_rng(master_seed, replica);
    let d = walk::walk_discoveries(dist, n, &mut rng, scratch);
    let field = SampledScenery { model, seed: scenery_seed(master_seed, replica) };
    build_pattern_from(&d, &field, tail, regime)
}

/// Patterns of replicas `0..replicas`, in replica order.
pub fn replica_patterns(
    dist: &StepDistribution,
    model: &SceneryModel,
    tail: &TailFamily,
    regime: &RegimeRule,
    n: u64,
    replicas: u64,
    master_seed: u64,
) -> Result<Vec<PointPattern>> {
    (0..replicas)
        .into_par_iter()
        .map_init(FxHashSet::default, |scratch, r| {
            replica_pattern(dist, model, tail, regime, n, master_seed, r, scratch)
        })
        .collect()
}

/// Per replica, the `k`-th discovery time `tau_k` and the scenery value
/// found there, `None` when the walk discovers fewer than `k` sites by
/// time `n`.
pub fn discovery_marks(
    dist: &StepDistribution,
    model: &SceneryModel,
    k: usize,
    n: u64,
    replicas: u64,
    master_seed: u64,
) -> Result<Vec<Option<(u64, f64)>>> {
    if k == 0 || n == 0 {
        return Err(Error::Domain("discovery index and horizon must be at least 1".into()));
    }
    (0..replicas)
        .into_par_iter()
        .map_init(FxHashSet::default, |scratch, r| {
            let mut rng = walk::walk_rng(master_seed, r);
            let d = walk::walk_discoveries(dist, n, &mut rng, scratch);
            if d.times.len() < k {
                return Ok(None);
            }
            let v = model.values(&[d.sites[k - 1]], scenery_seed(master_seed, r))?;
            Ok(Some((d.times[k - 1], v[0])))
        })
        .collect()
}

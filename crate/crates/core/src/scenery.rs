//! Stationary random sceneries `{xi(k), k in Z}` with known tails, their
//! norming constants and the limit measure `nu`.
//!
//! Every model is site-keyed: the value at site `z` is a deterministic
//! function of `(seed, z)` (for the Gaussian AR(1) model, of the innovations
//! on a bounded window to the left of `z`), so a scenery can be read along
//! the random set of sites a walk visits.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::rng::site_uniform;
use crate::stats::{normal_quantile, normal_sf};

/// Domain of attraction of the scenery's marginal, with a fixed base law per
/// family: Pareto (`P(xi > u) = u^-beta`, `u >= 1`) for Fréchet, `-U^(1/delta)`
/// with `U` uniform on (0, 1) for Weibull, unit exponential and standard
/// normal for the two Gumbel representatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailFamily {
    Frechet { beta: f64 },
    Weibull { delta: f64 },
    GumbelExponential,
    GumbelGaussian,
}

impl TailFamily {
    pub fn frechet(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Parameter(format!("Fréchet index must be positive, got {beta}")));
        }
        Ok(Self::Frechet { beta })
    }

    /// Weibull family. Only `delta = 1` (the negative uniform) is the
    /// validated default; other exponents are experimental.
    pub fn weibull(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Parameter(format!("Weibull index must be positive, got {delta}")));
        }
        Ok(Self::Weibull { delta })
    }

    pub fn is_experimental(&self) -> bool {
        matches!(self, Self::Weibull { delta } if *delta != 1.0)
    }

    /// State space `E` of the limit measure as `(lower, upper)`, open at the
    /// lower end: `(0, inf]`, `(-inf, 0]` or `(-inf, inf]`.
    pub fn state_space(&self) -> (f64, f64) {
        match self {
            Self::Frechet { .. } => (0.0, f64::INFINITY),
            Self::Weibull { .. } => (f64::NEG_INFINITY, 0.0),
            Self::GumbelExponential | Self::GumbelGaussian => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// `nu((x, inf))`: `x^-beta`, `(-x)^delta` or `e^-x`.
    pub fn nu_above(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::Domain("NaN interval endpoint".into()));
        }
        if x == f64::INFINITY {
            return Ok(0.0);
        }
        match *self {
            Self::Frechet { beta } => {
                if x < 0.0 {
                    Err(Error::Domain(format!("{x} lies outside E = (0, inf]")))
                } else {
                    Ok(x.powf(-beta))
                }
            }
            Self::Weibull { delta } => {
                if x > 0.0 {
                    Err(Error::Domain(format!("{x} lies outside E = (-inf, 0]")))
                } else {
                    Ok((-x).powf(delta))
                }
            }
            Self::GumbelExponential | Self::GumbelGaussian => Ok((-x).exp()),
        }
    }

    /// The `x` with `nu((x, inf)) = tau`.
    pub fn nu_inverse(&self, tau: f64) -> f64 {
        match *self {
            Self::Frechet { beta } => tau.powf(-1.0 / beta),
            Self::Weibull { delta } => -tau.powf(1.0 / delta),
            Self::GumbelExponential | Self::GumbelGaussian => -tau.ln(),
        }
    }

    /// Exact `P(xi > u)` under the base law.
    pub fn survival(&self, u: f64) -> f64 {
        match *self {
            Self::Frechet { beta } => {
                if u <= 1.0 {
                    1.0
                } else {
                    u.powf(-beta)
                }
            }
            Self::Weibull { delta } => {
                if u >= 0.0 {
                    0.0
                } else if u <= -1.0 {
                    1.0
                } else {
                    (-u).powf(delta)
                }
            }
            Self::GumbelExponential => {
                if u <= 0.0 {
                    1.0
                } else {
                    (-u).exp()
                }
            }
            Self::GumbelGaussian => normal_sf(u),
        }
    }

    /// The value `x` with `P(xi > x) = s`, for `s` in (0, 1).
    #[inline]
    pub fn inverse_survival(&self, s: f64) -> f64 {
        match *self {
            Self::Frechet { beta } => {
                if beta == 2.0 {
                    1.0 / s.sqrt()
                } else {
                    s.powf(-1.0 / beta)
                }
            }
            Self::Weibull { delta } => -s.powf(1.0 / delta),
            Self::GumbelExponential => -s.ln(),
            Self::GumbelGaussian => -normal_quantile(s),
        }
    }
}

impl fmt::Display for TailFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Frechet { beta } => write!(f, "frechet:{beta}"),
            Self::Weibull { delta } => write!(f, "weibull:{delta}"),
            Self::GumbelExponential => write!(f, "gumbel-exp"),
            Self::GumbelGaussian => write!(f, "gumbel-gauss"),
        }
    }
}

impl std::str::FromStr for TailFamily {
    type Err = Error;

    /// Inverse of `Display`.
    fn from_str(s: &str) -> Result<Self> {
        let index = |v: &str| {
            v.parse::<f64>().map_err(|_| Error::Parameter(format!("malformed tail index in {s:?}")))
        };
        match s.trim().split_once(':') {
            Some(("frechet", v)) => Self::frechet(index(v)?),
            Some(("weibull", v)) => Self::weibull(index(v)?),
            None if s.trim() == "gumbel-exp" => Ok(Self::GumbelExponential),
            None if s.trim() == "gumbel-gauss" => Ok(Self::GumbelGaussian),
            _ => Err(Error::Parameter(format!(
                "unknown tail {s:?}; expected frechet:B, weibull:D, gumbel-exp or gumbel-gauss"
            ))),
        }
    }
}

/// `P(xi > u)` for the family's base law.
pub fn tail_prob(tail: &TailFamily, u: f64) -> f64 {
    tail.survival(u)
}

/// Affine normalization `u_n(x) = a_n x + b_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormingConstants {
    pub a: f64,
    pub b: f64,
}

impl NormingConstants {
    pub fn threshold(&self, x: f64) -> f64 {
        self.a * x + self.b
    }

    pub fn rescale(&self, value: f64) -> f64 {
        (value - self.b) / self.a
    }
}

/// Norming constants at level `n`, chosen so that
/// `n P(xi > a_n x + b_n) -> nu((x, inf))`.
pub fn norming_constants(tail: &TailFamily, n: u64) -> Result<NormingConstants> {
    if n == 0 {
        return Err(Error::Domain("norming level must be at least 1".into()));
    }
    let nf = n as f64;
    Ok(match *tail {
        TailFamily::Frechet { beta } => NormingConstants { a: nf.powf(1.0 / beta), b: 0.0 },
        TailFamily::Weibull { delta } => NormingConstants { a: nf.powf(-1.0 / delta), b: 0.0 },
        TailFamily::GumbelExponential => NormingConstants { a: 1.0, b: nf.ln() },
        TailFamily::GumbelGaussian => {
            if n < 2 {
                return Err(Error::Domain("Gaussian norming needs n >= 2".into()));
            }
            let l = (2.0 * nf.ln()).sqrt();
            let b = l - (nf.ln().ln() + (4.0 * std::f64::consts::PI).ln()) / (2.0 * l);
            NormingConstants { a: 1.0 / l, b }
        }
    })
}

/// Threshold `u = a_level * nu^-1(tau) + b_level`, so that
/// `level * P(xi > u) ~ tau`.
pub fn threshold(tail: &TailFamily, level: u64, tau: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::Parameter(format!("tau must be positive, got {tau}")));
    }
    Ok(norming_constants(tail, level)?.threshold(tail.nu_inverse(tau)))
}

/// Half-open interval `(lo, hi]`; `hi = inf` stands for `(lo, inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::Domain(format!("malformed interval ({lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    #[inline]
    pub fn contains(&self, v: f64) -> bool {
        v > self.lo && v <= self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{}]", self.lo, self.hi)
    }
}

/// Finite union of half-open height intervals, kept sorted and disjoint.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HeightSet {
    intervals: Vec<Interval>,
}

impl HeightSet {
    pub fn new(intervals: impl IntoIterator<Item = Interval>) -> Self {
        let mut v: Vec<Interval> = intervals.into_iter().filter(|i| !i.is_empty()).collect();
        v.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut merged: Vec<Interval> = Vec::with_capacity(v.len());
        for i in v {
            match merged.last_mut() {
                Some(last) if i.lo <= last.hi => last.hi = last.hi.max(i.hi),
                _ => merged.push(i),
            }
        }
        Self { intervals: merged }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// `(x, inf)`.
    pub fn above(x: f64) -> Result<Self> {
        Ok(Self::new([Interval::new(x, f64::INFINITY)?]))
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Ok(Self::new([Interval::new(lo, hi)?]))
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    #[inline]
    pub fn contains(&self, v: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(v))
    }
}

impl fmt::Display for HeightSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.intervals.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join("u"))
    }
}

/// `nu(B)` by additivity over the intervals of `B`:
/// `nu((x, y]) = nu((x, inf)) - nu((y, inf))`.
pub fn nu(tail: &TailFamily, set: &HeightSet) -> Result<f64> {
    let (_, upper) = tail.state_space();
    let mut total = 0.0;
    for i in set.intervals() {
        if upper.is_finite() && i.hi.is_finite() && i.hi > upper {
            return Err(Error::Domain(format!("{i} lies outside the state space")));
        }
        let hi = if i.hi.is_infinite() { f64::INFINITY } else { i.hi };
        total += tail.nu_above(i.lo)? - tail.nu_above(hi)?;
    }
    Ok(total)
}

/// Dependence structure of the scenery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SceneryKind {
    /// Independent values.
    Iid,
    /// Stationary Gaussian AR(1) with lag-one correlation `rho`.
    GaussianAr1 { rho: f64 },
    /// `xi(k) = max(eta_k, ..., eta_{k+m-1})` with i.i.d. latent `eta` whose
    /// law is `F^(1/m)`, so `xi` has marginal `F`.
    MovingMax { window: usize },
}

/// A stationary scenery model together with its marginal tail family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneryModel {
    kind: SceneryKind,
    marginal: TailFamily,
}

/// Upper bound on the lattice points visited while evaluating an AR(1)
/// scenery on one site set.
const AR1_WORK_LIMIT: u64 = 1 << 32;

impl SceneryModel {
    pub fn iid(marginal: TailFamily) -> Self {
        Self { kind: SceneryKind::Iid, marginal }
    }

    /// Standard normal AR(1) scenery; its marginal is the Gaussian
    /// representative of the Gumbel family.
    pub fn gaussian_ar1(rho: f64) -> Result<Self> {
        if !(rho > -1.0 && rho < 1.0) {
            return Err(Error::Parameter(format!("AR(1) coefficient must lie in (-1, 1), got {rho}")));
        }
        Ok(Self { kind: SceneryKind::GaussianAr1 { rho }, marginal: TailFamily::GumbelGaussian })
    }

    pub fn moving_max(window: usize, marginal: TailFamily) -> Result<Self> {
        if window == 0 {
            return Err(Error::Parameter("moving-max window must be at least 1".into()));
        }
        Ok(Self { kind: SceneryKind::MovingMax { window }, marginal })
    }

    pub fn kind(&self) -> SceneryKind {
        self.kind
    }

    pub fn marginal(&self) -> &TailFamily {
        &self.marginal
    }

    pub fn is_iid(&self) -> bool {
        matches!(self.kind, SceneryKind::Iid)
    }

    /// Value at one site for the counter-based models (i.i.d. and
    /// moving-max); `None` for AR(1), which needs the whole site set.
    #[inline]
    pub fn value_at(&self, seed: u64, site: i64) -> Option<f64> {
        match self.kind {
            SceneryKind::Iid => Some(self.marginal.inverse_survival(site_uniform(seed, site))),
            SceneryKind::MovingMax { window } => {
                let w_min = (0..window as i64)
                    .map(|i| site_uniform(seed, site.wrapping_add(i)))
                    .fold(1.0, f64::min);
                Some(self.marginal.inverse_survival(moving_max_survival(w_min, window)))
            }
            SceneryKind::GaussianAr1 { .. } => None,
        }
    }

    /// Values at `sites` (any order, repeats allowed), aligned with the input.
    pub fn values(&self, sites: &[i64], seed: u64) -> Result<Vec<f64>> {
        match self.kind {
            SceneryKind::GaussianAr1 { rho } => ar1_values(rho, sites, seed),
            _ => Ok(sites.iter().map(|&z| self.value_at(seed, z).unwrap()).collect()),
        }
    }

    /// Values on the contiguous sites `start, start + 1, ..., start + len - 1`.
    pub fn values_on_range(&self, start: i64, len: usize, seed: u64) -> Result<Vec<f64>> {
        match self.kind {
            SceneryKind::Iid => Ok((0..len as i64)
                .map(|i| self.marginal.inverse_survival(site_uniform(seed, start + i)))
                .collect()),
            SceneryKind::MovingMax { window } => {
                let w: Vec<f64> =
                    (0..(len + window - 1) as i64).map(|i| site_uniform(seed, start + i)).collect();
                Ok(w.windows(window)
                    .map(|win| {
                        let m = win.iter().copied().fold(1.0, f64::min);
                        self.marginal.inverse_survival(moving_max_survival(m, window))
                    })
                    .collect())
            }
            SceneryKind::GaussianAr1 { rho } => {
                let sites: Vec<i64> = (0..len as i64).map(|i| start + i).collect();
                ar1_values(rho, &sites, seed)
            }
        }
    }
}

impl SceneryModel {
    /// Indicators `xi(z) > u` at `sites`, aligned with the input. For the
    /// counter-based models the comparison is made on the uniform scale
    /// (`U < P(xi > u)`), which is the same event without evaluating the
    /// inverse survival function.
    pub fn exceedances(&self, sites: &[i64], u: f64, seed: u64) -> Result<Vec<bool>> {
        let s_u = self.marginal.survival(u);
        match self.kind {
            SceneryKind::Iid => Ok(sites.iter().map(|&z| site_uniform(seed, z) < s_u).collect()),
            SceneryKind::MovingMax { window } => {
                let w_star = latent_cutoff(s_u, window);
                Ok(sites
                    .iter()
                    .map(|&z| (0..window as i64).any(|i| site_uniform(seed, z.wrapping_add(i)) < w_star))
                    .collect())
            }
            SceneryKind::GaussianAr1 { rho } => Ok(ar1_values(rho, sites, seed)?.into_iter().map(|v| v > u).collect()),
        }
    }

    /// Indicators `xi(z) > u` on `start, ..., start + len - 1`.
    pub fn exceedances_on_range(&self, start: i64, len: usize, u: f64, seed: u64) -> Result<Vec<bool>> {
        let s_u = self.marginal.survival(u);
        match self.kind {
            SceneryKind::Iid => Ok((0..len as i64).map(|i| site_uniform(seed, start + i) < s_u).collect()),
            SceneryKind::MovingMax { window } => {
                let w_star = latent_cutoff(s_u, window);
                let latent: Vec<bool> =
                    (0..(len + window - 1) as i64).map(|i| site_uniform(seed, start + i) < w_star).collect();
                let mut out = Vec::with_capacity(len);
                // Number of latent exceedances in the current window.
                let mut inside = latent[..window - 1].iter().filter(|&&b| b).count();
                for k in 0..len {
                    inside += latent[k + window - 1] as usize;
                    out.push(inside > 0);
                    inside -= latent[k] as usize;
                }
                Ok(out)
            }
            SceneryKind::GaussianAr1 { .. } => {
                Ok(self.values_on_range(start, len, seed)?.into_iter().map(|v| v > u).collect())
            }
        }
    }
}

/// Latent survival cutoff `w*` with `min W < w*` iff the moving maximum
/// exceeds the level of survival probability `s_u`.
fn latent_cutoff(s_u: f64, window: usize) -> f64 {
    if window == 1 {
        s_u
    } else {
        -f64::exp_m1((-s_u).ln_1p() / window as f64)
    }
}

impl fmt::Display for SceneryModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SceneryKind::Iid => write!(f, "iid({})", self.marginal),
            SceneryKind::GaussianAr1 { rho } => write!(f, "ar1:{rho}"),
            SceneryKind::MovingMax { window } => write!(f, "moving-max:{window}({})", self.marginal),
        }
    }
}

/// Survival probability of `max(eta_1..eta_m)` given the smallest latent
/// survival value `w_min`: `1 - (1 - w_min)^m`.
#[inline]
fn moving_max_survival(w_min: f64, window: usize) -> f64 {
    if window == 1 {
        w_min
    } else {
        -f64::exp_m1(window as f64 * (-w_min).ln_1p())
    }
}

/// Number of lattice steps after which the AR(1) recursion has forgotten its
/// start to within `2^-60`.
fn ar1_burn_in(rho: f64) -> u64 {
    if rho == 0.0 {
        0
    } else {
        (60.0 * std::f64::consts::LN_2 / -rho.abs().ln()).ceil() as u64
    }
}

/// Gaussian AR(1) values at arbitrary sites. Sorted distinct sites are
/// grouped into clusters whose gaps are at most the burn-in length; each
/// cluster runs the recursion `x_{z+1} = rho x_z + sqrt(1 - rho^2) e_{z+1}`
/// from `burn_in` sites before its first site, started at the stationary
/// draw `e_start`. Innovations `e_z` are site-keyed standard normals.
fn ar1_values(rho: f64, sites: &[i64], seed: u64) -> Result<Vec<f64>> {
    if sites.is_empty() {
        return Ok(Vec::new());
    }
    let burn = ar1_burn_in(rho);
    let mut sorted: Vec<i64> = sites.to_vec();
    sorted.sort_unstable();
    sorted.dedup();

    let mut work = 0u64;
    let mut prev: Option<i64> = None;
    for &z in &sorted {
        let gap = prev.map_or(u64::MAX, |p| (z - p) as u64);
        work = work.saturating_add(if gap > burn { burn + 1 } else { gap });
        prev = Some(z);
    }
    if work > AR1_WORK_LIMIT {
        return Err(Error::Resource(format!(
            "AR(1) scenery needs {work} lattice steps (limit {AR1_WORK_LIMIT})"
        )));
    }

    let innovation = |z: i64| normal_quantile(site_uniform(seed, z));
    let scale = (1.0 - rho * rho).sqrt();
    let mut out: HashMap<i64, f64> = HashMap::with_capacity(sorted.len());
    let mut state: Option<(i64, f64)> = None;
    for &z in &sorted {
        let (mut at, mut x) = match state {
            Some((p, x)) if ((z - p) as u64) <= burn => (p, x),
            _ => {
                let start = z - burn as i64;
                (start, innovation(start))
            }
        };
        while at < z {
            at += 1;
            x = rho * x + scale * innovation(at);
        }
        out.insert(z, x);
        state = Some((z, x));
    }
    Ok(sites.iter().map(|z| out[z]).collect())
}

/// Samples the scenery on `sites`.
pub fn sample_scenery(model: &SceneryModel, sites: &[i64], seed: u64) -> Result<BTreeMap<i64, f64>> {
    let values = model.values(sites, seed)?;
    Ok(sites.iter().copied().zip(values).collect())
}

/// Anything that can report scenery values at a list of sites: a sampled
/// model or an injected table.
pub trait SceneryField {
    fn values_at(&self, sites: &[i64]) -> Result<Vec<f64>>;
}

/// A model bound to a seed.
#[derive(Debug, Clone, Copy)]
pub struct SampledScenery<'a> {
    pub model: &'a SceneryModel,
    pub seed: u64,
}

impl SceneryField for SampledScenery<'_> {
    fn values_at(&self, sites: &[i64]) -> Result<Vec<f64>> {
        self.model.values(sites, self.seed)
    }
}

impl SceneryField for BTreeMap<i64, f64> {
    fn values_at(&self, sites: &[i64]) -> Result<Vec<f64>> {
        sites
            .iter()
            .map(|z| self.get(z).copied().ok_or_else(|| Error::Domain(format!("no scenery value at site {z}"))))
            .collect()
    }
}

impl SceneryField for HashMap<i64, f64> {
    fn values_at(&self, sites: &[i64]) -> Result<Vec<f64>> {
        sites
            .iter()
            .map(|z| self.get(z).copied().ok_or_else(|| Error::Domain(format!("no scenery value at site {z}"))))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{ks_two_sample, mean_se};
    use approx::assert_relative_eq;

    fn families() -> Vec<TailFamily> {
        vec![
            TailFamily::frechet(2.0).unwrap(),
            TailFamily::weibull(1.0).unwrap(),
            TailFamily::GumbelExponential,
            TailFamily::GumbelGaussian,
        ]
    }

    #[test]
    fn norming_hand_values() {
        let f = TailFamily::frechet(2.0).unwrap();
        assert_eq!(norming_constants(&f, 100).unwrap(), NormingConstants { a: 10.0, b: 0.0 });
        let n = 10f64.exp().round() as u64;
        let g = norming_constants(&TailFamily::GumbelExponential, n).unwrap();
        assert_eq!(g.a, 1.0);
        assert_eq!(g.b, (n as f64).ln());
        let w = norming_constants(&TailFamily::weibull(1.0).unwrap(), 50).unwrap();
        assert_relative_eq!(w.a, 1.0 / 50.0);
        assert!(matches!(norming_constants(&f, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn tail_names_parse_back() {
        for t in families() {
            assert_eq!(t.to_string().parse::<TailFamily>().unwrap(), t);
        }
        assert!("frechet:-1".parse::<TailFamily>().is_err());
        assert!("pareto".parse::<TailFamily>().is_err());
    }

    #[test]
    fn gaussian_norming_at_ten_thousand() {
        // n P(xi > b_n) should be close to nu((0, inf)) = 1.
        let g = norming_constants(&TailFamily::GumbelGaussian, 10_000).unwrap();
        let v = 10_000.0 * normal_sf(g.b);
        assert!((v - 1.0).abs() <= 0.1, "{v}");
    }

    #[test]
    fn nu_examples() {
        let f = TailFamily::frechet(2.0).unwrap();
        assert_eq!(nu(&f, &HeightSet::above(1.0).unwrap()).unwrap(), 1.0);
        for t in families() {
            assert_eq!(nu(&t, &HeightSet::empty()).unwrap(), 0.0);
        }
        let g = TailFamily::GumbelExponential;
        assert_eq!(nu(&g, &HeightSet::above(0.0).unwrap()).unwrap(), 1.0);
        assert_relative_eq!(nu(&g, &HeightSet::above(2f64.ln()).unwrap()).unwrap(), 0.5, epsilon = 1e-15);
        // Additivity over a union.
        let b = HeightSet::new([Interval::new(1.0, 2.0).unwrap(), Interval::new(3.0, f64::INFINITY).unwrap()]);
        assert_relative_eq!(nu(&f, &b).unwrap(), 1.0 - 0.25 + 1.0 / 9.0, epsilon = 1e-15);
        let w = TailFamily::weibull(1.0).unwrap();
        assert_relative_eq!(nu(&w, &HeightSet::interval(-2.0, -0.5).unwrap()).unwrap(), 1.5);
    }

    #[test]
    fn nu_outside_state_space() {
        let f = TailFamily::frechet(2.0).unwrap();
        assert!(matches!(nu(&f, &HeightSet::above(-1.0).unwrap()), Err(Error::Domain(_))));
        let w = TailFamily::weibull(1.0).unwrap();
        assert!(matches!(nu(&w, &HeightSet::interval(0.5, 2.0).unwrap()), Err(Error::Domain(_))));
    }

    #[test]
    fn interval_rejects_reversed_endpoints() {
        assert!(matches!(Interval::new(2.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn height_set_merges_overlaps() {
        let s = HeightSet::new([
            Interval::new(3.0, 5.0).unwrap(),
            Interval::new(1.0, 2.0).unwrap(),
            Interval::new(1.5, 3.5).unwrap(),
        ]);
        assert_eq!(s.intervals(), &[Interval { lo: 1.0, hi: 5.0 }]);
        assert!(!s.contains(1.0));
        assert!(s.contains(5.0));
    }

    #[test]
    fn tail_prob_examples() {
        assert_relative_eq!(tail_prob(&TailFamily::frechet(2.0).unwrap(), 10.0), 0.01, epsilon = 1e-15);
        assert_relative_eq!(tail_prob(&TailFamily::weibull(1.0).unwrap(), -0.25), 0.25);
        // Oracle: Simpson integration of the standard normal density on
        // [1.96, 12].
        let (a, b, m) = (1.96f64, 12.0f64, 20_000);
        let h = (b - a) / m as f64;
        let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut s = phi(a) + phi(b);
        for i in 1..m {
            let x = a + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * phi(x);
        }
        let oracle = s * h / 3.0;
        assert!((oracle - 0.0250).abs() < 1e-4);
        assert_relative_eq!(tail_prob(&TailFamily::GumbelGaussian, 1.96), oracle, epsilon = 1e-10);
    }

    #[test]
    fn norming_converges_to_nu() {
        let n = 1_000_000u64;
        for tail in families() {
            let c = norming_constants(&tail, n).unwrap();
            let grid: Vec<f64> = match tail {
                TailFamily::Frechet { .. } => vec![0.5, 1.0, 1.5, 2.0, 3.0],
                TailFamily::Weibull { .. } => vec![-3.0, -2.0, -1.0, -0.5, -0.1],
                _ => vec![-1.0, -0.5, 0.0, 0.5, 1.0],
            };
            let tol = if tail == TailFamily::GumbelGaussian { 0.15 } else { 0.05 };
            for x in grid {
                let lhs = n as f64 * tail_prob(&tail, c.threshold(x));
                let rhs = tail.nu_above(x).unwrap();
                assert!((lhs / rhs - 1.0).abs() <= tol, "{tail} x = {x}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn nu_inverse_round_trips() {
        for tail in families() {
            for tau in [0.5, 1.0, 2.0] {
                assert_relative_eq!(tail.nu_above(tail.nu_inverse(tau)).unwrap(), tau, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn inverse_survival_matches_survival() {
        for tail in families() {
            for s in [0.9, 0.5, 0.1, 1e-3, 1e-6] {
                assert_relative_eq!(tail.survival(tail.inverse_survival(s)), s, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn iid_queries_are_reproducible() {
        let m = SceneryModel::iid(TailFamily::frechet(2.0).unwrap());
        let a = sample_scenery(&m, &[0, 5, -3], 9).unwrap();
        let b = sample_scenery(&m, &[0, 5, -3], 9).unwrap();
        assert_eq!(a, b);
        let sup = sample_scenery(&m, &[-3, -2, 0, 1, 5, 100], 9).unwrap();
        for (z, v) in &a {
            assert_eq!(sup[z], *v);
        }
        assert!(sample_scenery(&m, &[], 9).unwrap().is_empty());
    }

    #[test]
    fn moving_max_shares_latent_values() {
        let m = SceneryModel::moving_max(2, TailFamily::frechet(2.0).unwrap()).unwrap();
        // xi(0) = max(eta_0, eta_1), xi(1) = max(eta_1, eta_2); equal whenever
        // eta_1 has the smallest latent survival value of the three.
        let mut shared = 0;
        for seed in 0..2000u64 {
            let w: Vec<f64> = (0..3).map(|z| site_uniform(seed, z)).collect();
            let v = m.values(&[0, 1], seed).unwrap();
            if w[1] < w[0] && w[1] < w[2] {
                assert_eq!(v[0], v[1]);
                shared += 1;
            }
        }
        assert!(shared > 500);
    }

    #[test]
    fn moving_max_marginal_is_the_tail_family() {
        let tail = TailFamily::frechet(2.0).unwrap();
        let m = SceneryModel::moving_max(3, tail).unwrap();
        let iid = SceneryModel::iid(tail);
        let a = m.values_on_range(0, 20_000, 1).unwrap();
        // Sparse sites so the iid reference sample is independent.
        let b = iid.values_on_range(0, 20_000, 2).unwrap();
        let r = ks_two_sample(&a.iter().step_by(4).copied().collect::<Vec<_>>(), &b);
        assert!(r.p_value > 0.01, "{r:?}");
    }

    #[test]
    fn range_and_point_evaluation_agree() {
        let tail = TailFamily::GumbelExponential;
        for model in [
            SceneryModel::iid(tail),
            SceneryModel::moving_max(3, tail).unwrap(),
            SceneryModel::gaussian_ar1(0.7).unwrap(),
        ] {
            let a = model.values_on_range(-10, 50, 4).unwrap();
            let sites: Vec<i64> = (-10..40).collect();
            let b = model.values(&sites, 4).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn ar1_lag_one_autocorrelation() {
        let m = SceneryModel::gaussian_ar1(0.5).unwrap();
        let x = m.values_on_range(0, 10_001, 77).unwrap();
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let var: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
        let cov: f64 = x.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum::<f64>();
        let r1 = cov / var;
        // Closed form: corr(x_k, x_{k+1}) = rho.
        assert!((r1 - 0.5).abs() <= 0.02, "{r1}");
        assert!((mean_se(&x).value).abs() < 0.1);
    }

    #[test]
    fn ar1_is_consistent_across_supersets() {
        let m = SceneryModel::gaussian_ar1(0.9).unwrap();
        let a = sample_scenery(&m, &[0, 3, 1000], 5).unwrap();
        let b = sample_scenery(&m, &[-500, 0, 2, 3, 999, 1000, 10_000_000], 5).unwrap();
        for (z, v) in &a {
            assert!((b[z] - v).abs() <= 1e-12, "site {z}");
        }
    }

    #[test]
    fn ar1_handles_huge_spans() {
        let m = SceneryModel::gaussian_ar1(0.5).unwrap();
        let v = m.values(&[i64::MIN / 4, 0, i64::MAX / 4], 1).unwrap();
        assert_eq!(v.len(), 3);
        let m = SceneryModel::gaussian_ar1(0.999_999_999).unwrap();
        assert!(matches!(m.values(&[0], 1), Err(Error::Resource(_))));
    }

    #[test]
    fn stationarity_of_pairs() {
        // (xi(0), xi(1)) against (xi(17), xi(18)) over independent seeds.
        let tail = TailFamily::frechet(2.0).unwrap();
        for model in [
            SceneryModel::iid(tail),
            SceneryModel::moving_max(2, tail).unwrap(),
            SceneryModel::gaussian_ar1(0.5).unwrap(),
        ] {
            let (mut a0, mut a1, mut b0, mut b1) = (vec![], vec![], vec![], vec![]);
            for seed in 0..3000u64 {
                let v = model.values(&[0, 1, 17, 18], seed).unwrap();
                a0.push(v[0]);
                a1.push(v[1]);
                b0.push(v[2]);
                b1.push(v[3]);
            }
            assert!(ks_two_sample(&a0, &b0).p_value > 0.01, "{model}");
            assert!(ks_two_sample(&a1, &b1).p_value > 0.01, "{model}");
        }
    }

    #[test]
    fn injected_field_reports_missing_sites() {
        let mut m = BTreeMap::new();
        m.insert(1, 4.0);
        assert_eq!(m.values_at(&[1]).unwrap(), vec![4.0]);
        assert!(matches!(m.values_at(&[2]), Err(Error::Domain(_))));
    }

    #[test]
    fn exceedance_indicators_match_values() {
        let tail = TailFamily::frechet(2.0).unwrap();
        for model in [
            SceneryModel::iid(tail),
            SceneryModel::moving_max(3, tail).unwrap(),
            SceneryModel::gaussian_ar1(0.5).unwrap(),
        ] {
            for u in [1.5, 3.0] {
                let v = model.values_on_range(-20, 3000, 8).unwrap();
                let a = model.exceedances_on_range(-20, 3000, u, 8).unwrap();
                let sites: Vec<i64> = (-20..2980).collect();
                let b = model.exceedances(&sites, u, 8).unwrap();
                assert_eq!(a, b);
                let c: Vec<bool> = v.iter().map(|&x| x > u).collect();
                assert_eq!(a, c, "{model} u = {u}");
            }
        }
    }
}

//! Reference values for the limit laws: exact functionals of the Poisson
//! process with intensity `Leb x nu`, and a Monte Carlo reference for the
//! Cox process whose random intensity is the range measure of the stable
//! limit of the walk.

use rayon::prelude::*;
use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::exceedance::ProductSet;
use crate::rng::{self, Stream};
use crate::scenery::{nu, TailFamily};
use crate::stats::{self, floor_pow, Estimate};
use crate::walk::{self, Regime, StepDistribution};

/// Upper bound on `N * M` walk steps for one Cox reference.
const COX_STEP_LIMIT: u64 = 1 << 40;

/// `E N(I) = (b - a) nu(B)`.
pub fn poisson_mean(set: &ProductSet, tail: &TailFamily) -> Result<f64> {
    if set.time_length() == 0.0 {
        return Ok(0.0);
    }
    Ok(set.time_length() * nu(tail, &set.heights)?)
}

/// `P(N(I) = 0) = exp(-(b - a) nu(B))`.
pub fn poisson_void(set: &ProductSet, tail: &TailFamily) -> Result<f64> {
    Ok((-poisson_mean(set, tail)?).exp())
}

/// `P(N(I) = k)`.
pub fn poisson_count_pmf(set: &ProductSet, tail: &TailFamily, k: u64) -> Result<f64> {
    Ok(poisson_pmf(poisson_mean(set, tail)?, k))
}

/// Poisson probability `e^-lambda lambda^k / k!`, evaluated in log space.
pub fn poisson_pmf(lambda: f64, k: u64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if k == 0 {
        return (-lambda).exp();
    }
    let kf = k as f64;
    (kf * lambda.ln() - lambda - statrs::function::gamma::ln_gamma(kf + 1.0)).exp()
}

/// Discretized Cox limit: the range measure of the stable process on
/// `(a, b]` is approximated by `(R_floor(Nb) - R_floor(Na)) / N^(1/alpha)`
/// for a walk of the same family at resolution `N`.
#[derive(Debug, Clone)]
pub struct CoxLimit {
    pub dist: StepDistribution,
    pub resolution: u64,
    pub replicas: u64,
}

impl CoxLimit {
    pub fn new(dist: StepDistribution, resolution: u64, replicas: u64) -> Result<Self> {
        if dist.regime() != Regime::Recurrent {
            return Err(Error::Regime(format!("the Cox limit needs a recurrent walk (1 < alpha <= 2), got {dist}")));
        }
        if resolution == 0 || replicas < 2 {
            return Err(Error::Parameter("Cox reference needs N >= 1 and at least 2 replicas".into()));
        }
        if resolution.saturating_mul(replicas) > COX_STEP_LIMIT {
            return Err(Error::Resource(format!(
                "Cox reference with N = {resolution}, M = {replicas} exceeds {COX_STEP_LIMIT} steps"
            )));
        }
        Ok(Self { dist, resolution, replicas })
    }

    /// Default resolution for an experiment at horizon `n`.
    pub fn default_resolution(n: u64) -> u64 {
        n.saturating_mul(10)
    }

    pub fn alpha(&self) -> f64 {
        self.dist.alpha().unwrap_or(2.0)
    }
}

/// Cox reference for one product set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoxEstimate {
    /// `E exp(-Z nu(B))`.
    pub void: Estimate,
    /// `E Z`, the mean range measure of `(a, b]`.
    pub mean_z: Estimate,
    /// `E Z nu(B)`, the mean count.
    pub mean_count: Estimate,
}

/// Per-replica range increments `Z_r` of the Cox driver over `(a, b]`.
pub fn cox_range_samples(limit: &CoxLimit, a: f64, b: f64, master_seed: u64) -> Result<Vec<f64>> {
    if !(0.0 <= a && a <= b && b <= 1.0) {
        return Err(Error::Domain(format!("Cox window ({a}, {b}] must lie in [0, 1]")));
    }
    let big_n = limit.resolution;
    let lo = (big_n as f64 * a).floor() as u64;
    let hi = (big_n as f64 * b).floor() as u64;
    if lo == hi {
        return Ok(vec![0.0; limit.replicas as usize]);
    }
    let scale = cox_scale(big_n, limit.alpha());
    Ok((0..limit.replicas)
        .into_par_iter()
        .map_init(FxHashSet::default, |scratch, r| {
            let seed = rng::derive(rng::replica_seed(master_seed, r), Stream::CoxReference);
            let mut rng = rng::rng_from_seed(seed);
            let d = walk::walk_discoveries(&limit.dist, hi, &mut rng, scratch);
            d.count_between(lo, hi) as f64 / scale
        })
        .collect())
}

/// `N^(1/alpha)` as a float; integral when the power is.
fn cox_scale(big_n: u64, alpha: f64) -> f64 {
    let f = floor_pow(big_n, 1.0 / alpha) as f64;
    let x = (big_n as f64).powf(1.0 / alpha);
    if (x - f).abs() <= 1e-9 * f { f } else { x }
}

/// Monte Carlo void probability `E exp(-Z nu(B))` of the Cox limit.
pub fn cox_void_mc(limit: &CoxLimit, set: &ProductSet, tail: &TailFamily, master_seed: u64) -> Result<CoxEstimate> {
    let nu_b = nu(tail, &set.heights)?;
    if nu_b == 0.0 || set.time_length() == 0.0 {
        let z = if set.time_length() == 0.0 {
            Estimate::exact(0.0)
        } else {
            stats::mean_se(&cox_range_samples(limit, set.a, set.b, master_seed)?)
        };
        return Ok(CoxEstimate { void: Estimate::exact(1.0), mean_z: z, mean_count: Estimate::exact(0.0) });
    }
    let z = cox_range_samples(limit, set.a, set.b, master_seed)?;
    let voids: Vec<f64> = z.iter().map(|z| (-z * nu_b).exp()).collect();
    let mean_z = stats::mean_se(&z);
    Ok(CoxEstimate {
        void: stats::mean_se(&voids),
        mean_z,
        mean_count: Estimate::new(mean_z.value * nu_b, mean_z.se * nu_b),
    })
}

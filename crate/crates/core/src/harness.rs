//! Replication engine and statistical verdicts.
//!
//! An experiment reduces to a replica-by-query matrix of point counts; the
//! evaluators turn that matrix into [`TestReport`]s against the limit laws.
//! The matrix source is a [`CountSampler`], so an ideal Poisson or Cox
//! sampler can stand in for the exceedance process to test the harness
//! itself.

use std::fmt;
use std::io::Write;
use std::time::Instant;

use rand::SeedableRng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::exceedance::{count_in, discovery_marks, replica_pattern, ProductSet, RegimeRule};
use crate::limits::{cox_range_samples, cox_void_mc, poisson_mean, poisson_pmf, poisson_void, CoxLimit};
use crate::rng::{self, ReplicaRng, Stream};
use crate::scenery::{nu, SceneryModel, TailFamily};
use crate::stats::{self, chi_square_gof_counts, chi_square_independence, ks_two_sample, Estimate};
use crate::walk::{self, QEstimate, Regime, StepDistribution};

/// Smallest replica count for a run that issues verdicts.
pub const MIN_VERDICT_REPLICAS: u64 = 100;
/// Significance level of the goodness-of-fit and independence tests.
pub const DEFAULT_TEST_LEVEL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Undefined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Undefined => "undefined",
        })
    }
}

/// How a report's estimate is compared with its reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Check {
    /// `|estimate - reference| <= sigmas * se`, `se` already combining
    /// every Monte Carlo layer.
    Band { sigmas: f64 },
    /// `|estimate - reference| <= tol`.
    Within { tol: f64 },
    /// `estimate >= reference`.
    AtLeast,
    /// `estimate < reference`.
    Below,
    /// The estimate is a p-value; `estimate > reference`.
    PValue,
    /// No verdict requested.
    Informational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    pub name: String,
    pub estimate: f64,
    /// Combined standard error; NaN when not applicable.
    pub se: f64,
    pub reference: f64,
    pub verdict: Verdict,
    pub check: Check,
    pub runtime_ms: u128,
    pub seed: u64,
}

impl TestReport {
    pub fn new(name: impl Into<String>, estimate: Estimate, reference: f64, check: Check, seed: u64) -> Self {
        let verdict = if estimate.value.is_nan() || reference.is_nan() {
            Verdict::Undefined
        } else {
            let ok = match check {
                Check::Band { sigmas } => {
                    let diff = (estimate.value - reference).abs();
                    diff == 0.0 || diff <= sigmas * estimate.se
                }
                Check::Within { tol } => (estimate.value - reference).abs() <= tol,
                Check::AtLeast => estimate.value >= reference,
                Check::Below => estimate.value < reference,
                Check::PValue => estimate.value > reference,
                Check::Informational => true,
            };
            if matches!(check, Check::Informational) {
                Verdict::Undefined
            } else if ok {
                Verdict::Pass
            } else {
                Verdict::Fail
            }
        };
        Self {
            name: name.into(),
            estimate: estimate.value,
            se: estimate.se,
            reference,
            verdict,
            check,
            runtime_ms: 0,
            seed,
        }
    }

    /// Band check against a reference with its own standard error.
    pub fn band(name: impl Into<String>, estimate: Estimate, reference: Estimate, sigmas: f64, seed: u64) -> Self {
        let se = (estimate.se * estimate.se + reference.se * reference.se).sqrt();
        Self::new(name, Estimate::new(estimate.value, se), reference.value, Check::Band { sigmas }, seed)
    }

    pub fn with_runtime(mut self, ms: u128) -> Self {
        self.runtime_ms = ms;
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn is_verdict_bearing(&self) -> bool {
        !matches!(self.check, Check::Informational)
    }
}

pub const REPORT_HEADER: &str = "name,estimate,se,reference,verdict,runtime_ms,seed";

/// Writes reports as CSV. With `mask_runtime` the runtime column is left
/// empty, for byte comparison of reruns.
pub fn write_reports_csv<W: Write>(out: &mut W, reports: &[TestReport], mask_runtime: bool) -> Result<()> {
    writeln!(out, "{REPORT_HEADER}")?;
    for r in reports {
        let runtime = if mask_runtime { String::new() } else { r.runtime_ms.to_string() };
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            csv_field(&r.name),
            r.estimate,
            r.se,
            r.reference,
            r.verdict,
            runtime,
            r.seed
        )?;
    }
    Ok(())
}

pub fn reports_csv(reports: &[TestReport], mask_runtime: bool) -> String {
    let mut buf = Vec::new();
    write_reports_csv(&mut buf, reports, mask_runtime).expect("writing to memory");
    String::from_utf8(buf).expect("CSV is UTF-8")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Human-readable summary, one line per report, with a note on the
/// family-wise level when several band checks share a run.
pub fn summary(reports: &[TestReport]) -> String {
    let mut s = String::new();
    for r in reports {
        s.push_str(&format!(
            "{:<9} {}: estimate {} (se {}) vs reference {}\n",
            r.verdict.to_string().to_uppercase(),
            r.name,
            r.estimate,
            r.se,
            r.reference
        ));
    }
    let bands: Vec<f64> = reports
        .iter()
        .filter_map(|r| match r.check {
            Check::Band { sigmas } => Some(sigmas),
            _ => None,
        })
        .collect();
    if bands.len() > 1 {
        let level: f64 = bands.iter().map(|&k| 2.0 * stats::normal_sf(k)).sum();
        s.push_str(&format!(
            "note: {} band checks; Bonferroni bound on the chance of any false failure is {:.4}. \
             Checks computed from the same replicas are correlated.\n",
            bands.len(),
            level.min(1.0)
        ));
    }
    s
}

/// One experiment: walk, scenery, norming regime and query sets.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub walk: StepDistribution,
    pub scenery: SceneryModel,
    pub tail: TailFamily,
    pub regime: RegimeRule,
    pub n: u64,
    pub replicas: u64,
    pub master_seed: u64,
    pub queries: Vec<ProductSet>,
    /// Sigma multiplier of band checks.
    pub sigmas: f64,
    /// Test pairwise independence of counts on disjoint query sets.
    pub independence: bool,
    pub test_level: f64,
    /// Prefix of report names.
    pub label: String,
}

impl ExperimentConfig {
    pub fn new(
        walk: StepDistribution,
        scenery: SceneryModel,
        regime: RegimeRule,
        n: u64,
        replicas: u64,
        master_seed: u64,
        queries: Vec<ProductSet>,
    ) -> Self {
        Self {
            walk,
            tail: *scenery.marginal(),
            scenery,
            regime,
            n,
            replicas,
            master_seed,
            queries,
            sigmas: 3.0,
            independence: true,
            test_level: DEFAULT_TEST_LEVEL,
            label: String::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.replicas < MIN_VERDICT_REPLICAS {
            return Err(Error::Parameter(format!(
                "verdict-bearing runs need at least {MIN_VERDICT_REPLICAS} replicas, got {}",
                self.replicas
            )));
        }
        if self.queries.is_empty() {
            return Err(Error::Parameter("no query sets".into()));
        }
        if self.walk.regime() != self.regime.regime() {
            return Err(Error::Regime(format!(
                "walk {} is {:?} but the regime rule is {}",
                self.walk,
                self.walk.regime(),
                self.regime
            )));
        }
        Ok(())
    }

    fn name(&self, what: &str, query: &ProductSet) -> String {
        if self.label.is_empty() {
            format!("{what}{query}")
        } else {
            format!("{}/{what}{query}", self.label)
        }
    }

    fn pair_name(&self, a: &ProductSet, b: &ProductSet) -> String {
        let base = format!("corr{a}|{b}");
        if self.label.is_empty() {
            base
        } else {
            format!("{}/{base}", self.label)
        }
    }
}

/// Source of per-replica point counts, one per query set.
pub trait CountSampler: Sync {
    fn counts(&self, replica: u64) -> Result<Vec<u64>>;
}

/// Counts of the exceedance process `N^(n)` of a configured experiment.
pub struct ExceedanceSampler<'a> {
    pub config: &'a ExperimentConfig,
}

impl CountSampler for ExceedanceSampler<'_> {
    fn counts(&self, replica: u64) -> Result<Vec<u64>> {
        thread_local! {
            static SCRATCH: std::cell::RefCell<FxHashSet<i64>> = std::cell::RefCell::new(FxHashSet::default());
        }
        let c = self.config;
        let pattern = SCRATCH.with(|s| {
            replica_pattern(&c.walk, &c.scenery, &c.tail, &c.regime, c.n, c.master_seed, replica, &mut s.borrow_mut())
        })?;
        Ok(c.queries.iter().map(|q| count_in(&pattern, q)).collect())
    }
}

/// Ideal sampler: independent Poisson counts with the given means. With a
/// random intensity per replica it becomes a Cox sampler.
pub struct PoissonDouble {
    /// Per query, the mean count for intensity one.
    pub means: Vec<f64>,
    /// Per replica intensity multiplier (`None` for a Poisson process).
    pub intensity: Option<Vec<f64>>,
    pub seed: u64,
}

impl CountSampler for PoissonDouble {
    fn counts(&self, replica: u64) -> Result<Vec<u64>> {
        let mut rng = ReplicaRng::seed_from_u64(rng::replica_seed(self.seed, replica));
        let z = self.intensity.as_ref().map_or(1.0, |v| v[replica as usize]);
        Ok(self
            .means
            .iter()
            .map(|&m| {
                let lambda = m * z;
                if lambda <= 0.0 {
                    0
                } else {
                    Poisson::new(lambda).map(|d| d.sample(&mut rng) as u64).unwrap_or(0)
                }
            })
            .collect())
    }
}

/// Replica-by-query count matrix, in replica order.
pub fn count_matrix(sampler: &dyn CountSampler, replicas: u64) -> Result<Vec<Vec<u64>>> {
    (0..replicas).into_par_iter().map(|r| sampler.counts(r)).collect()
}

fn column(matrix: &[Vec<u64>], i: usize) -> Vec<f64> {
    matrix.iter().map(|row| row[i] as f64).collect()
}

/// Poisson checks of a count matrix: void and mean in `sigmas` bands, count
/// histogram goodness of fit, and pairwise count correlation on disjoint
/// sets. `scale_rel_se` is the relative calibration error of `m(n)`; it is
/// propagated to void and mean through `E N ~ 1/m`.
pub fn evaluate_poisson(config: &ExperimentConfig, matrix: &[Vec<u64>], scale_rel_se: f64) -> Result<Vec<TestReport>> {
    let m = matrix.len() as u64;
    let seed = config.master_seed;
    let mut reports = Vec::new();
    for (i, q) in config.queries.iter().enumerate() {
        let counts = column(matrix, i);
        let zeros = counts.iter().filter(|&&c| c == 0.0).count() as u64;
        let void = stats::proportion(zeros, m);
        let mean = stats::mean_se(&counts);
        let cal_void = void.value * -void.value.max(f64::MIN_POSITIVE).ln() * scale_rel_se;
        let cal_mean = mean.value * scale_rel_se;
        let void = Estimate::new(void.value, void.se.hypot(cal_void));
        let mean = Estimate::new(mean.value, mean.se.hypot(cal_mean));
        let band = Check::Band { sigmas: config.sigmas };
        reports.push(TestReport::new(config.name("void", q), void, poisson_void(q, &config.tail)?, band, seed));
        let lambda = poisson_mean(q, &config.tail)?;
        reports.push(TestReport::new(config.name("mean", q), mean, lambda, band, seed));

        let raw: Vec<u64> = matrix.iter().map(|row| row[i]).collect();
        let gof = chi_square_gof_counts(&raw, |k| poisson_pmf(lambda, k), 5.0);
        reports.push(TestReport::new(
            config.name("gof", q),
            Estimate::new(gof.p_value, f64::NAN),
            config.test_level,
            Check::PValue,
            seed,
        ));
    }
    if config.independence {
        reports.extend(correlation_reports(config, matrix));
    }
    Ok(reports)
}

fn correlation_reports(config: &ExperimentConfig, matrix: &[Vec<u64>]) -> Vec<TestReport> {
    let m = matrix.len() as f64;
    let mut out = Vec::new();
    for i in 0..config.queries.len() {
        for j in i + 1..config.queries.len() {
            let (a, b) = (&config.queries[i], &config.queries[j]);
            if !a.is_disjoint_from(b) {
                continue;
            }
            let r = stats::correlation(&column(matrix, i), &column(matrix, j));
            // Null standard deviation of a sample correlation.
            let est = Estimate::new(if r.is_nan() { 0.0 } else { r }, 1.0 / m.sqrt());
            out.push(TestReport::new(
                config.pair_name(a, b),
                est,
                0.0,
                Check::Band { sigmas: config.sigmas },
                config.master_seed,
            ));
        }
    }
    out
}

/// Checks the exceedance process of a transient or boundary experiment
/// against its Poisson limit.
pub fn verify_poisson(config: &ExperimentConfig) -> Result<Vec<TestReport>> {
    config.validate()?;
    if config.regime.regime() == Regime::Recurrent {
        return Err(Error::Regime("the Poisson limit needs alpha <= 1; use verify_cox".into()));
    }
    let start = Instant::now();
    let matrix = count_matrix(&ExceedanceSampler { config }, config.replicas)?;
    let reports = evaluate_poisson(config, &matrix, config.regime.scale_relative_se())?;
    let ms = start.elapsed().as_millis();
    Ok(reports.into_iter().map(|r| r.with_runtime(ms)).collect())
}

/// Cox checks of a count matrix: void against the Monte Carlo Cox void and
/// mean against `E[Z] nu(B)`, both with combined standard errors.
pub fn evaluate_cox(config: &ExperimentConfig, matrix: &[Vec<u64>], limit: &CoxLimit) -> Result<Vec<TestReport>> {
    let m = matrix.len() as u64;
    let seed = config.master_seed;
    let mut reports = Vec::new();
    for (i, q) in config.queries.iter().enumerate() {
        let counts = column(matrix, i);
        let zeros = counts.iter().filter(|&&c| c == 0.0).count() as u64;
        let cox = cox_void_mc(limit, q, &config.tail, seed)?;
        reports.push(TestReport::band(
            config.name("void", q),
            stats::proportion(zeros, m),
            cox.void,
            config.sigmas,
            seed,
        ));
        reports.push(TestReport::band(
            config.name("mean", q),
            stats::mean_se(&counts),
            cox.mean_count,
            config.sigmas,
            seed,
        ));
    }
    Ok(reports)
}

/// Checks the exceedance process of a recurrent experiment against the
/// discretized Cox limit.
pub fn verify_cox(config: &ExperimentConfig, limit: &CoxLimit) -> Result<Vec<TestReport>> {
    config.validate()?;
    if config.regime.regime() != Regime::Recurrent {
        return Err(Error::Regime("the Cox limit needs 1 < alpha <= 2".into()));
    }
    let start = Instant::now();
    let matrix = count_matrix(&ExceedanceSampler { config }, config.replicas)?;
    let reports = evaluate_cox(config, &matrix, limit)?;
    let ms = start.elapsed().as_millis();
    Ok(reports.into_iter().map(|r| r.with_runtime(ms)).collect())
}

/// Result of a calibration run.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub rule: RegimeRule,
    /// Both estimators of `q` in the transient regime.
    pub q: Option<QEstimate>,
}

/// Estimates the regime constants at horizon `n` on the calibration stream
/// of `master_seed`. The transient rule uses the range-slope estimator of
/// `q`, the boundary rule the visit-count estimator of `h(n)`.
pub fn calibrate(dist: &StepDistribution, n: u64, replicas: u64, master_seed: u64) -> Result<Calibration> {
    if n < 1000 {
        return Err(Error::Domain(format!("calibration needs n >= 1000, got {n}")));
    }
    let seed = rng::derive(master_seed, Stream::Calibration);
    Ok(match dist.regime() {
        Regime::Transient => {
            let q = walk::estimate_q_unchecked(dist, n, replicas, seed)?;
            Calibration { rule: RegimeRule::Transient { q_hat: q.slope }, q: Some(q) }
        }
        Regime::Boundary => {
            let h = walk::estimate_h(dist, n, replicas, seed)?;
            Calibration { rule: RegimeRule::Boundary { h_hat: h }, q: None }
        }
        Regime::Recurrent => {
            Calibration { rule: RegimeRule::Recurrent { alpha: dist.alpha().unwrap_or(2.0) }, q: None }
        }
    })
}

/// Discovery-independence checks at index `k`: independence of `tau_k` (binned
/// into about `bins` quantile classes) and the exceedance flag
/// `xi(S_{tau_k}) > u`, and the height marginal against the scenery's.
#[allow(clippy::too_many_arguments)]
pub fn verify_discovery_independence(
    dist: &StepDistribution,
    model: &SceneryModel,
    k: usize,
    n: u64,
    u: f64,
    bins: usize,
    replicas: u64,
    master_seed: u64,
) -> Result<Vec<TestReport>> {
    let start = Instant::now();
    let marks: Vec<(u64, f64)> =
        discovery_marks(dist, model, k, n, replicas, master_seed)?.into_iter().flatten().collect();
    if marks.is_empty() {
        return Err(Error::Parameter(format!("no walk discovered {k} sites by time {n}")));
    }
    let mut taus: Vec<u64> = marks.iter().map(|m| m.0).collect();
    taus.sort_unstable();
    // Class boundaries at distinct values, each class holding about 1/bins.
    let mut cuts: Vec<u64> = Vec::new();
    let per = taus.len().div_ceil(bins.max(1));
    let mut i = 0;
    while i < taus.len() {
        let v = taus[(i + per - 1).min(taus.len() - 1)];
        cuts.push(v);
        i = taus.partition_point(|&t| t <= v);
    }
    let mut table = vec![vec![0.0; 2]; cuts.len()];
    for (tau, v) in &marks {
        let class = cuts.partition_point(|&c| c < *tau);
        table[class][(*v > u) as usize] += 1.0;
    }
    let chi = chi_square_independence(&table);
    let heights: Vec<f64> = marks.iter().map(|m| m.1).collect();
    let reference = model.values_on_range(0, heights.len(), rng::derive(master_seed, Stream::Secondary))?;
    let reference: Vec<f64> = if model.is_iid() {
        reference
    } else {
        // Spread sites out so the reference sample is close to independent.
        let sites: Vec<i64> = (0..heights.len() as i64).map(|i| i * 1000).collect();
        model.values(&sites, rng::derive(master_seed, Stream::Secondary))?
    };
    let ks = ks_two_sample(&heights, &reference);
    let ms = start.elapsed().as_millis();
    Ok(vec![
        TestReport::new(
            format!("discovery-independence[k={k}]"),
            Estimate::new(chi.p_value, f64::NAN),
            DEFAULT_TEST_LEVEL,
            Check::PValue,
            master_seed,
        )
        .with_runtime(ms),
        TestReport::new(
            format!("discovery-marginal[k={k}]"),
            Estimate::new(ks.p_value, f64::NAN),
            DEFAULT_TEST_LEVEL,
            Check::PValue,
            master_seed,
        )
        .with_runtime(ms),
    ])
}

/// Repeats [`evaluate_poisson`] on `runs` independent ideal Poisson samples
/// and returns the fraction of runs with at least one failed check.
pub fn poisson_self_test(config: &ExperimentConfig, runs: u64) -> Result<f64> {
    let means: Vec<f64> = config.queries.iter().map(|q| poisson_mean(q, &config.tail)).collect::<Result<_>>()?;
    let mut failed = 0;
    for run in 0..runs {
        let double = PoissonDouble { means: means.clone(), intensity: None, seed: rng::replica_seed(config.master_seed, run) };
        let matrix = count_matrix(&double, config.replicas)?;
        let reports = evaluate_poisson(config, &matrix, 0.0)?;
        failed += reports.iter().any(|r| r.verdict == Verdict::Fail) as u64;
    }
    Ok(failed as f64 / runs as f64)
}

/// Repeats [`evaluate_cox`] on `runs` ideal Cox samples whose intensities are
/// drawn from an independent copy of the Cox driver, and returns the
/// fraction of runs with at least one failed check.
pub fn cox_self_test(config: &ExperimentConfig, limit: &CoxLimit, runs: u64) -> Result<f64> {
    let mut failed = 0;
    for run in 0..runs {
        let seed = rng::replica_seed(config.master_seed, run);
        let mut per_query = Vec::new();
        for q in &config.queries {
            let z = cox_range_samples(&CoxLimit { replicas: config.replicas, ..limit.clone() }, q.a, q.b, seed ^ 1)?;
            per_query.push((nu(&config.tail, &q.heights)?, z));
        }
        // One query at a time: counts on each set are Poisson(Z nu(B)).
        let mut matrix = vec![Vec::new(); config.replicas as usize];
        for (nu_b, z) in &per_query {
            let double = PoissonDouble { means: vec![*nu_b], intensity: Some(z.clone()), seed };
            for (row, c) in matrix.iter_mut().zip(count_matrix(&double, config.replicas)?) {
                row.push(c[0]);
            }
        }
        let cfg = ExperimentConfig { master_seed: seed, ..config.clone() };
        let reports = evaluate_cox(&cfg, &matrix, limit)?;
        failed += reports.iter().any(|r| r.verdict == Verdict::Fail) as u64;
    }
    Ok(failed as f64 / runs as f64)
}

/// Nominal chance that one run of [`evaluate_poisson`] on an ideal sampler
/// fails some check (Bonferroni bound).
pub fn nominal_failure_level(config: &ExperimentConfig) -> f64 {
    let band = 2.0 * stats::normal_sf(config.sigmas);
    let q = config.queries.len() as f64;
    let pairs = if config.independence {
        let mut k = 0;
        for i in 0..config.queries.len() {
            for j in i + 1..config.queries.len() {
                k += config.queries[i].is_disjoint_from(&config.queries[j]) as u64;
            }
        }
        k as f64
    } else {
        0.0
    };
    (q * (2.0 * band + config.test_level) + pairs * band).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenery::HeightSet;

    fn frechet_config(queries: Vec<ProductSet>, replicas: u64) -> ExperimentConfig {
        ExperimentConfig::new(
            StepDistribution::symmetric_zeta(0.5).unwrap(),
            SceneryModel::iid(TailFamily::frechet(2.0).unwrap()),
            RegimeRule::Transient { q_hat: Estimate::exact(0.8) },
            1000,
            replicas,
            9,
            queries,
        )
    }

    fn halves() -> Vec<ProductSet> {
        let b = HeightSet::above(1.0).unwrap();
        vec![
            ProductSet::new(0.0, 1.0, b.clone()).unwrap(),
            ProductSet::new(0.0, 0.5, b.clone()).unwrap(),
            ProductSet::new(0.5, 1.0, b).unwrap(),
        ]
    }

    #[test]
    fn verdict_rules() {
        let e = Estimate::new(1.05, 0.02);
        assert_eq!(TestReport::new("a", e, 1.0, Check::Band { sigmas: 3.0 }, 0).verdict, Verdict::Pass);
        assert_eq!(TestReport::new("a", e, 1.0, Check::Band { sigmas: 2.0 }, 0).verdict, Verdict::Fail);
        assert_eq!(TestReport::new("a", e, 1.0, Check::AtLeast, 0).verdict, Verdict::Pass);
        assert_eq!(TestReport::new("a", e, 1.0, Check::Within { tol: 0.06 }, 0).verdict, Verdict::Pass);
        assert_eq!(TestReport::new("a", e, 1.0, Check::Within { tol: 0.04 }, 0).verdict, Verdict::Fail);
        assert_eq!(TestReport::new("a", e, 1.05, Check::Below, 0).verdict, Verdict::Fail);
        assert_eq!(TestReport::new("a", e, 0.01, Check::PValue, 0).verdict, Verdict::Pass);
        let exact = Estimate::exact(1.0);
        assert_eq!(TestReport::new("a", exact, 1.0, Check::Band { sigmas: 3.0 }, 0).verdict, Verdict::Pass);
        assert_eq!(
            TestReport::new("a", Estimate::undefined(), 1.0, Check::Band { sigmas: 3.0 }, 0).verdict,
            Verdict::Undefined
        );
    }

    #[test]
    fn csv_layout() {
        let r = TestReport::new("void(0,1]x(1,inf]", Estimate::new(0.5, 0.01), 0.25, Check::Band { sigmas: 3.0 }, 42)
            .with_runtime(17);
        let csv = reports_csv(std::slice::from_ref(&r), false);
        assert_eq!(csv, format!("{REPORT_HEADER}\n\"void(0,1]x(1,inf]\",0.5,0.01,0.25,fail,17,42\n"));
        assert!(reports_csv(&[r], true).contains(",fail,,42"));
    }

    #[test]
    fn ideal_poisson_sampler_passes_every_check() {
        let config = frechet_config(halves(), 5000);
        let double = PoissonDouble { means: vec![1.0, 0.5, 0.5], intensity: None, seed: 3 };
        let matrix = count_matrix(&double, config.replicas).unwrap();
        // Only the two halves are disjoint: one correlation check.
        let reports = evaluate_poisson(&config, &matrix, 0.0).unwrap();
        assert_eq!(reports.len(), 3 * 3 + 1);
        assert!(reports.iter().all(|r| r.passed()), "{}", summary(&reports));
    }

    #[test]
    fn poisson_self_test_false_failure_rate() {
        let config = frechet_config(halves(), 1000);
        let rate = poisson_self_test(&config, 100).unwrap();
        let nominal = nominal_failure_level(&config);
        assert!(rate_within_level(rate, 100, nominal), "rate {rate} nominal {nominal}");
    }

    /// One-sided binomial test of `failure rate <= nominal` at level 0.01.
    fn rate_within_level(rate: f64, runs: u64, nominal: f64) -> bool {
        let k = (rate * runs as f64).round() as u64;
        let ln = statrs::function::gamma::ln_gamma;
        let upper: f64 = (k..=runs)
            .map(|j| {
                let (j, n) = (j as f64, runs as f64);
                (ln(n + 1.0) - ln(j + 1.0) - ln(n - j + 1.0) + j * nominal.ln() + (n - j) * (1.0 - nominal).ln()).exp()
            })
            .sum();
        upper >= 0.01
    }

    #[test]
    fn cox_self_test_false_failure_rate() {
        let b = HeightSet::above(0.0).unwrap();
        let config = ExperimentConfig::new(
            StepDistribution::simple_lazy(0.5).unwrap(),
            SceneryModel::iid(TailFamily::GumbelExponential),
            RegimeRule::Recurrent { alpha: 2.0 },
            1000,
            300,
            4,
            vec![ProductSet::new(0.0, 1.0, b).unwrap()],
        );
        let limit = CoxLimit::new(StepDistribution::simple_lazy(0.5).unwrap(), 1000, 300).unwrap();
        let rate = cox_self_test(&config, &limit, 100).unwrap();
        let nominal = 2.0 * 2.0 * stats::normal_sf(3.0);
        assert!(rate_within_level(rate, 100, nominal), "rate {rate}");
    }

    #[test]
    fn verify_poisson_small_transient_run() {
        let mut config = frechet_config(halves(), 400);
        config.n = 2000;
        let reports = verify_poisson(&config).unwrap();
        assert_eq!(reports.len(), 10);
        assert!(reports.iter().all(|r| r.verdict != Verdict::Undefined), "{}", summary(&reports));
    }

    #[test]
    fn verify_poisson_guards() {
        let config = frechet_config(halves(), 50);
        assert!(matches!(verify_poisson(&config), Err(Error::Parameter(_))));
        let mut config = frechet_config(halves(), 200);
        config.regime = RegimeRule::Boundary { h_hat: Estimate::exact(3.0) };
        assert!(matches!(verify_poisson(&config), Err(Error::Regime(_))));
    }

    #[test]
    fn cox_with_null_heights_is_exact() {
        let empty = HeightSet::above(f64::INFINITY).unwrap();
        let config = ExperimentConfig::new(
            StepDistribution::simple_lazy(0.5).unwrap(),
            SceneryModel::iid(TailFamily::GumbelExponential),
            RegimeRule::Recurrent { alpha: 2.0 },
            1000,
            100,
            4,
            vec![ProductSet::new(0.0, 1.0, empty).unwrap()],
        );
        let limit = CoxLimit::new(StepDistribution::simple_lazy(0.5).unwrap(), 1000, 100).unwrap();
        let reports = verify_cox(&config, &limit).unwrap();
        assert_eq!((reports[0].estimate, reports[0].reference), (1.0, 1.0));
        assert_eq!((reports[1].estimate, reports[1].reference), (0.0, 0.0));
        assert!(reports.iter().all(|r| r.passed()));
    }

    #[test]
    fn calibration_rules() {
        let drift = calibrate(&StepDistribution::drift(), 1000, 10, 1).unwrap();
        assert_eq!(drift.rule, RegimeRule::Transient { q_hat: Estimate::exact(1.0) });
        let lazy = calibrate(&StepDistribution::simple_lazy(0.5).unwrap(), 1_000_000, 10, 1).unwrap();
        assert_eq!(lazy.rule, RegimeRule::Recurrent { alpha: 2.0 });
        assert_eq!(crate::exceedance::m_of_n(&lazy.rule, 1_000_000).unwrap(), 1000);
        let z = calibrate(&StepDistribution::symmetric_zeta(0.5).unwrap(), 10_000, 100, 1).unwrap();
        assert!(z.q.unwrap().agreement_z <= 3.0);
        assert!(matches!(calibrate(&StepDistribution::drift(), 999, 10, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn reports_are_reproducible() {
        let config = frechet_config(halves(), 200);
        let a = reports_csv(&verify_poisson(&config).unwrap(), true);
        let b = reports_csv(&verify_poisson(&config).unwrap(), true);
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let c = pool.install(|| reports_csv(&verify_poisson(&config).unwrap(), true));
        assert_eq!(a, c);
    }
}

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use rwrs_core::exceedance::{m_of_n, replica_patterns, write_patterns_csv, ProductSet, RegimeRule};
use rwrs_core::extremal::{mu_prime, obrien_theta, theorem6_gap, BlockScheme, ThresholdRule};
use rwrs_core::harness::{calibrate, verify_cox, verify_poisson, Calibration, Check, ExperimentConfig, TestReport};
use rwrs_core::limits::CoxLimit;
use rwrs_core::mixing::{dinfty_table, dprime_sum_rwrs, dprime_sum_scenery};
use rwrs_core::scenery::{HeightSet, SceneryKind, SceneryModel, TailFamily};
use rwrs_core::stats::{floor_pow, Estimate};
use rwrs_core::walk::{range_fractions, Regime, StepDistribution};
use rwrs_core::{Error, Result};

use crate::cli::*;

/// What a subcommand produced.
pub struct Outcome {
    pub reports: Vec<TestReport>,
    /// Extra files written under the output directory.
    pub files: Vec<PathBuf>,
}

impl Outcome {
    fn reports(reports: Vec<TestReport>) -> Self {
        Self { reports, files: Vec::new() }
    }
}

pub fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::RangeLaw(a) => range_law(a),
        Command::Calibrate(a) => calibrate_cmd(a),
        Command::Simulate(a) => simulate(a),
        Command::VerifyPoisson(a) => verify_poisson_cmd(a),
        Command::VerifyCox(a) => verify_cox_cmd(a),
        Command::ExtremalIndex(a) => extremal_index(a),
        Command::Obrien(a) => obrien(a),
        Command::Theorem6(a) => theorem6(a),
        Command::Mixing(a) => mixing(a),
    }
}

fn walk(c: &Common) -> Result<StepDistribution> {
    match c.walk {
        None => StepDistribution::for_alpha(c.alpha),
        Some(WalkKind::Zeta) => StepDistribution::symmetric_zeta(c.alpha),
        Some(WalkKind::Lazy) => StepDistribution::simple_lazy(c.laziness),
        Some(WalkKind::Drift) => Ok(StepDistribution::drift()),
    }
}

fn scenery(c: &Common) -> Result<(SceneryModel, TailFamily)> {
    let spec = c.scenery.trim();
    let bad = || Error::Parameter(format!("unknown scenery {spec:?}; expected iid, ar1:RHO or moving-max:WINDOW"));
    let tail = c.tail.unwrap_or(if spec.starts_with("ar1") {
        TailFamily::GumbelGaussian
    } else {
        TailFamily::frechet(2.0)?
    });
    let model = match spec.split_once(':') {
        None if spec == "iid" => SceneryModel::iid(tail),
        Some(("ar1", rho)) => {
            if tail != TailFamily::GumbelGaussian {
                return Err(Error::Parameter(format!("the AR(1) scenery has a Gaussian marginal, not {tail}")));
            }
            SceneryModel::gaussian_ar1(rho.parse().map_err(|_| bad())?)?
        }
        Some(("moving-max", w)) => SceneryModel::moving_max(w.parse().map_err(|_| bad())?, tail)?,
        _ => return Err(bad()),
    };
    Ok((model, tail))
}

fn regime_rule(dist: &StepDistribution, c: &Common, r: &RegimeArgs) -> Result<Calibration> {
    let exact = |rule| Calibration { rule, q: None };
    match (dist.regime(), r.q_hat, r.h_hat) {
        (Regime::Transient, Some(q), _) => Ok(exact(RegimeRule::Transient { q_hat: Estimate::exact(q) })),
        (Regime::Boundary, _, Some(h)) => Ok(exact(RegimeRule::Boundary { h_hat: Estimate::exact(h) })),
        (Regime::Transient, None, _) if dist.alpha().is_none() => {
            Ok(exact(RegimeRule::Transient { q_hat: Estimate::exact(1.0) }))
        }
        _ => calibrate(dist, c.n, r.calibration_replicas, c.seed),
    }
}

fn pair(s: &str, what: &str) -> Result<(f64, f64)> {
    let bad = || Error::Parameter(format!("malformed {what} {s:?}; expected two comma-separated numbers"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let num = |v: &str| -> Result<f64> {
        match v.trim() {
            "inf" | "+inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            v => v.parse().map_err(|_| bad()),
        }
    };
    Ok((num(a)?, num(b)?))
}

/// Query sets from `--window` and `--height`: the full window `(0, 1]` and
/// the heights with limit measure one above them by default.
fn queries(q: &QueryArgs, tail: &TailFamily) -> Result<Vec<ProductSet>> {
    let windows: Vec<(f64, f64)> = if q.windows.is_empty() {
        vec![(0.0, 1.0)]
    } else {
        q.windows.iter().map(|w| pair(w, "window")).collect::<Result<_>>()?
    };
    let heights: Vec<HeightSet> = if q.heights.is_empty() {
        // `+ 0.0` turns a negative zero into a positive one for display.
        vec![HeightSet::above(tail.nu_inverse(1.0) + 0.0)?]
    } else {
        q.heights
            .iter()
            .map(|h| pair(h, "height").and_then(|(lo, hi)| HeightSet::interval(lo, hi)))
            .collect::<Result<_>>()?
    };
    if heights.len() != 1 && heights.len() != windows.len() {
        return Err(Error::Parameter(format!(
            "{} heights for {} windows; give one height or one per window",
            heights.len(),
            windows.len()
        )));
    }
    windows
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| ProductSet::new(a, b, heights[if heights.len() == 1 { 0 } else { i }].clone()))
        .collect()
}

fn threshold_rule(t: &ThresholdArgs) -> ThresholdRule {
    match t.threshold {
        Some(u) => ThresholdRule::Fixed(u),
        None => ThresholdRule::Norming { tau: t.tau },
    }
}

fn scheme(n: u64, t: &ThresholdArgs) -> Result<BlockScheme> {
    let default = BlockScheme::default_for(n)?;
    BlockScheme::new(n, t.k_n.unwrap_or(default.k_n), t.l_n.unwrap_or(default.l_n))
}

fn transient_q(cal: &Calibration) -> Result<Estimate> {
    match cal.rule {
        RegimeRule::Transient { q_hat } => Ok(q_hat),
        _ => Err(Error::Regime("this estimator needs a transient walk (alpha < 1)".into())),
    }
}

fn range_law(a: &RangeLawArgs) -> Result<Outcome> {
    let c = &a.common;
    let dist = walk(c)?;
    // R_[nt] / n is compared with q t, or R_[nt] h(n) / n with t at alpha = 1.
    let (name, scale) = match regime_rule(&dist, c, &a.regime)?.rule {
        RegimeRule::Transient { q_hat } => ("q", q_hat),
        RegimeRule::Boundary { h_hat } => ("h", Estimate::new(1.0 / h_hat.value, h_hat.se / (h_hat.value * h_hat.value))),
        RegimeRule::Recurrent { .. } => {
            return Err(Error::Regime("the range has no deterministic limit for alpha > 1".into()));
        }
    };
    let means = range_fractions(&dist, c.n, c.replicas, c.seed, &a.fractions)?;
    let reports = a
        .fractions
        .iter()
        .zip(&means)
        .map(|(&t, m)| {
            let ratio = Estimate::new(m.value / scale.value, m.se / scale.value);
            TestReport::new(format!("range-ratio[t={t},{name}]"), ratio, t, Check::Within { tol: a.tolerance * t }, c.seed)
        })
        .collect();
    Ok(Outcome::reports(reports))
}

fn calibrate_cmd(a: &CalibrateArgs) -> Result<Outcome> {
    let c = &a.common;
    let dist = walk(c)?;
    let cal = calibrate(&dist, c.n, c.replicas, c.seed)?;
    let reports = match (&cal.rule, &cal.q) {
        (_, Some(q)) => vec![TestReport::band("q-hat", q.slope, q.no_return, 3.0, c.seed)],
        (RegimeRule::Boundary { h_hat }, _) => {
            vec![TestReport::new("h-hat", *h_hat, f64::NAN, Check::Informational, c.seed)]
        }
        (rule, _) => {
            let m = m_of_n(rule, c.n)? as f64;
            let expected = floor_pow(c.n, 1.0 / dist.alpha().unwrap_or(1.0)) as f64;
            vec![TestReport::new("m(n)", Estimate::exact(m), expected, Check::Band { sigmas: 0.0 }, c.seed)]
        }
    };
    Ok(Outcome::reports(reports))
}

fn simulate(a: &SimulateArgs) -> Result<Outcome> {
    let c = &a.common;
    let dist = walk(c)?;
    let (model, tail) = scenery(c)?;
    let rule = regime_rule(&dist, c, &a.regime)?.rule;
    let patterns = replica_patterns(&dist, &model, &tail, &rule, c.n, c.replicas, c.seed)?;
    let path = c.out.join("patterns.csv");
    let mut out = BufWriter::new(File::create(&path)?);
    write_patterns_csv(&mut out, patterns.iter().enumerate().map(|(r, p)| (r as u64, p)))?;
    Ok(Outcome { reports: Vec::new(), files: vec![path] })
}

fn verify_poisson_cmd(a: &VerifyPoissonArgs) -> Result<Outcome> {
    let c = &a.common;
    let dist = walk(c)?;
    let (model, tail) = scenery(c)?;
    let rule = regime_rule(&dist, c, &a.regime)?.rule;
    let mut config = ExperimentConfig::new(dist, model, rule, c.n, c.replicas, c.seed, queries(&a.query, &tail)?);
    config.sigmas = a.query.sigmas;
    config.independence = !a.no_independence;
    config.test_level = a.gof_level;
    Ok(Outcome::reports(verify_poisson(&config)?))
}

fn verify_cox_cmd(a: &VerifyCoxArgs) -> Result<Outcome> {
    let c = &a.common;
    let dist = walk(c)?;
    if dist.regime() != Regime::Recurrent {
        return Err(Error::Regime(format!("the Cox limit needs 1 < alpha <= 2, got {dist}")));
    }
    let (model, tail) = scenery(c)?;
    let rule = RegimeRule::Recurrent { alpha: dist.alpha().unwrap_or(2.0) };
    let limit = CoxLimit::new(
        dist.clone(),
        a.resolution.unwrap_or(CoxLimit::default_resolution(c.n)),
        a.cox_replicas.unwrap_or(c.replicas),
    )?;
    let mut config = ExperimentConfig::new(dist, model, rule, c.n, c.replicas, c.seed, queries(&a.query, &tail)?);
    config.sigmas = a.query.sigmas;
    Ok(Outcome::reports(verify_cox(&config, &limit)?))
}

fn extremal_index(a: &BlockArgs) -> Result<Outcome> {
    let c = &a.common;
    let dist = walk(c)?;
    let (model, tail) = scenery(c)?;
    let q = transient_q(&regime_rule(&dist, c, &a.regime)?)?;
    let scheme = scheme(c.n, &a.threshold)?;
    let mu = mu_prime(&dist, &model, &tail, c.n, &scheme, c.replicas, threshold_rule(&a.threshold), c.seed)?;
    Ok(Outcome::reports(vec![
        TestReport::band("mu-prime", mu.mu_prime, q, a.sigmas, c.seed),
        TestReport::new("mu-prime-rescaled", mu.rescaled, f64::NAN, Check::Informational, c.seed),
    ]))
}

/// Extremal index of the scenery sequence, where known in closed form.
fn scenery_theta(model: &SceneryModel) -> f64 {
    match model.kind() {
        SceneryKind::Iid | SceneryKind::GaussianAr1 { .. } => 1.0,
        SceneryKind::MovingMax { window } => 1.0 / window as f64,
    }
}

fn obrien(a: &BlockArgs) -> Result<Outcome> {
    let c = &a.common;
    let (model, tail) = scenery(c)?;
    let scheme = scheme(c.n, &a.threshold)?;
    let rep = obrien_theta(&model, &tail, c.n, &scheme, c.replicas, threshold_rule(&a.threshold), c.seed)?;
    let theta = scenery_theta(&model);
    Ok(Outcome::reports(vec![
        TestReport::new("obrien-theta", rep.theta, theta, Check::Band { sigmas: a.sigmas }, c.seed),
        TestReport::band("obrien-max-below", rep.max_below, rep.exp_term, a.sigmas, c.seed),
    ]))
}

fn theorem6(a: &BlockArgs) -> Result<Outcome> {
    let c = &a.common;
    let dist = walk(c)?;
    let (model, tail) = scenery(c)?;
    let scheme = scheme(c.n, &a.threshold)?;
    let g = theorem6_gap(&dist, &model, &tail, c.n, &scheme, c.replicas, threshold_rule(&a.threshold), c.seed)?;
    let exp_leaders = (-g.leader_sum.value).exp();
    Ok(Outcome::reports(vec![
        TestReport::new("theorem6-gap", g.gap, 0.05, Check::Below, c.seed),
        TestReport::new("theorem6-max-below", g.max_below, exp_leaders, Check::Informational, c.seed),
    ]))
}

fn mixing(a: &MixingArgs) -> Result<Outcome> {
    let c = &a.common;
    let (model, tail) = scenery(c)?;
    let rule = threshold_rule(&a.threshold);
    let k_n = scheme(c.n, &a.threshold)?.k_n;
    let reports = match a.which {
        MixingKind::DprimeScenery => {
            let rep = dprime_sum_scenery(&model, &tail, c.n, k_n, c.replicas, rule, c.seed)?;
            let (reference, check) = match rep.closed_form {
                Some(f) => (f, Check::Band { sigmas: a.sigmas }),
                None => (f64::NAN, Check::Informational),
            };
            vec![TestReport::new("dprime-scenery", rep.estimate, reference, check, c.seed)]
        }
        MixingKind::DprimeRwrs | MixingKind::Dinfty => {
            let dist = walk(c)?;
            let q = transient_q(&regime_rule(&dist, c, &a.regime)?)?;
            if a.which == MixingKind::DprimeRwrs {
                let rep = dprime_sum_rwrs(&dist, &model, &tail, c.n, k_n, c.replicas, rule, &q, c.seed)?;
                let bound = rep.reference_bound.unwrap_or(f64::NAN);
                vec![TestReport::new("dprime-rwrs", rep.estimate, bound, Check::AtLeast, c.seed)]
            } else {
                dinfty_table(&dist, &model, &tail, c.n, &a.k, k_n, c.replicas, rule, &q, c.seed)?
                    .into_iter()
                    .map(|rep| {
                        let k = rep.k.unwrap_or(0);
                        TestReport::new(format!("dinfty[k={k}]"), rep.estimate, f64::NAN, Check::Informational, c.seed)
                    })
                    .collect()
            }
        }
    };
    Ok(Outcome::reports(reports))
}

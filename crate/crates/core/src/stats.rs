//! Small statistical toolkit: Monte Carlo estimates with standard errors,
//! chi-square and Kolmogorov-Smirnov tests, least squares.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// A Monte Carlo estimate and its standard error. An undefined estimate
/// (preconditions of the estimator failed) carries NaN in both fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    pub fn new(value: f64, se: f64) -> Self {
        Self { value, se }
    }

    pub fn exact(value: f64) -> Self {
        Self { value, se: 0.0 }
    }

    pub fn undefined() -> Self {
        Self { value: f64::NAN, se: f64::NAN }
    }

    pub fn is_defined(&self) -> bool {
        !self.value.is_nan()
    }

    /// Standardized distance to `reference`, whose own standard error is
    /// `reference_se` (zero for exact references).
    pub fn z_score(&self, reference: f64, reference_se: f64) -> f64 {
        let sigma = (self.se * self.se + reference_se * reference_se).sqrt();
        let diff = (self.value - reference).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / sigma
        }
    }

    pub fn within(&self, reference: f64, reference_se: f64, sigmas: f64) -> bool {
        self.is_defined() && self.z_score(reference, reference_se) <= sigmas
    }
}

/// Sample mean with standard error `sd / sqrt(n)`; accumulation runs in
/// slice order.
pub fn mean_se(values: &[f64]) -> Estimate {
    let n = values.len();
    if n == 0 {
        return Estimate::undefined();
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Estimate::new(mean, f64::NAN);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Estimate::new(mean, (ss / (n - 1) as f64 / n as f64).sqrt())
}

/// Ratio estimator `sum(x) / sum(y)` over paired replica values, with the
/// delta-method standard error.
pub fn ratio_se(xs: &[f64], ys: &[f64]) -> Estimate {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    let sy: f64 = ys.iter().sum();
    if n < 2 || sy == 0.0 {
        return Estimate::undefined();
    }
    let r = xs.iter().sum::<f64>() / sy;
    let ybar = sy / n as f64;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (x - r * y) * (x - r * y)).sum();
    Estimate::new(r, (ss / (n * (n - 1)) as f64).sqrt() / ybar)
}

/// `floor(n^e)`, snapping to the nearest integer when `n^e` is within
/// rounding error of it (so `floor(10^6^(1/2)) = 1000`).
pub fn floor_pow(n: u64, e: f64) -> u64 {
    let x = (n as f64).powf(e);
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r as u64
    } else {
        x.floor() as u64
    }
}

/// Binomial frequency `hits / total` with standard error `sqrt(p(1-p)/total)`.
pub fn proportion(hits: u64, total: u64) -> Estimate {
    if total == 0 {
        return Estimate::undefined();
    }
    let p = hits as f64 / total as f64;
    Estimate::new(p, (p * (1.0 - p) / total as f64).sqrt())
}

/// Sample Pearson correlation. NaN when either sample is constant.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Ordinary least squares fit `y = slope * x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

pub fn chi_square_sf(statistic: f64, df: usize) -> f64 {
    if df == 0 {
        return f64::NAN;
    }
    ChiSquared::new(df as f64).map(|d| d.sf(statistic)).unwrap_or(f64::NAN)
}

pub fn normal_sf(x: f64) -> f64 {
    Normal::standard().sf(x)
}

pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// Outcome of a chi-square test.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Goodness of fit of observed integer counts against a pmf on {0, 1, ...}.
///
/// Categories are pooled left to right until each bin's expected count is at
/// least `min_expected`; the last bin is open (`k >= start`) and carries the
/// remaining probability mass. An undersized last bin is merged into its
/// predecessor.
pub fn chi_square_gof_counts(
    counts: &[u64],
    pmf: impl Fn(u64) -> f64,
    min_expected: f64,
) -> ChiSquareTest {
    let total = counts.len() as f64;
    let kmax = counts.iter().copied().max().unwrap_or(0);
    let mut observed = vec![0u64; kmax as usize + 1];
    for &c in counts {
        observed[c as usize] += 1;
    }

    // (observed, expected) per pooled bin.
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut acc_o = 0.0;
    let mut acc_e = 0.0;
    let mut mass_used = 0.0;
    let mut k = 0u64;
    loop {
        let p = pmf(k);
        let o = observed.get(k as usize).copied().unwrap_or(0) as f64;
        acc_o += o;
        acc_e += total * p;
        mass_used += p;
        let remaining = (1.0 - mass_used).max(0.0) * total;
        let beyond_obs: f64 = observed.iter().skip(k as usize + 1).map(|&c| c as f64).sum();
        if acc_e >= min_expected && remaining >= min_expected {
            bins.push((acc_o, acc_e));
            acc_o = 0.0;
            acc_e = 0.0;
        } else if remaining < min_expected || k >= kmax.max(1) * 4 + 64 {
            // Close the open tail bin.
            acc_o += beyond_obs;
            acc_e += remaining;
            bins.push((acc_o, acc_e));
            break;
        }
        k += 1;
    }
    if bins.len() >= 2 {
        let last = bins[bins.len() - 1];
        if last.1 < min_expected {
            bins.pop();
            let prev = bins.last_mut().unwrap();
            prev.0 += last.0;
            prev.1 += last.1;
        }
    }
    let statistic: f64 = bins
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum();
    let df = bins.len().saturating_sub(1);
    ChiSquareTest { statistic, df, p_value: chi_square_sf(statistic, df) }
}

/// Pearson chi-square test of independence on an r x c table of counts.
pub fn chi_square_independence(table: &[Vec<f64>]) -> ChiSquareTest {
    let rows = table.len();
    let cols = table.first().map_or(0, Vec::len);
    let row_sums: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
    let col_sums: Vec<f64> = (0..cols).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let total: f64 = row_sums.iter().sum();
    let mut statistic = 0.0;
    for i in 0..rows {
        for j in 0..cols {
            let e = row_sums[i] * col_sums[j] / total;
            if e > 0.0 {
                let d = table[i][j] - e;
                statistic += d * d / e;
            }
        }
    }
    let df = rows.saturating_sub(1) * cols.saturating_sub(1);
    ChiSquareTest { statistic, df, p_value: chi_square_sf(statistic, df) }
}

/// Two-sample Kolmogorov-Smirnov test.
#[derive(Debug, Clone, PartialEq)]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
}

/// Survival function of the Kolmogorov distribution,
/// `Q(x) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 x^2)`.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic two-sample KS test with Stephens' small-sample correction.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsTest {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < na && a[i] <= x {
            i += 1;
        }
        while j < nb && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let ne = (na * nb) as f64 / (na + nb) as f64;
    let sq = ne.sqrt();
    let lambda = (sq + 0.12 + 0.11 / sq) * d;
    KsTest { statistic: d, p_value: kolmogorov_sf(lambda) }
}

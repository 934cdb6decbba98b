//! Distributional summary of a return series: moments, Bera–Jarque normality
//! test and Engle's LM test for ARCH effects.
//!
//! Skewness and excess kurtosis are the bias-adjusted sample estimators used by
//! spreadsheet `SKEW`/`KURT`:
//!
//! ```text
//! G1 = g1 · sqrt(n(n−1)) / (n−2)
//! G2 = ((n+1)·g2 + 6) · (n−1) / ((n−2)(n−3))
//! ```
//!
//! where `g1 = m3 / m2^1.5`, `g2 = m4 / m2² − 3` and `mk` are central moments with
//! an `n` denominator. The Bera–Jarque statistic `n/6·(G1² + G2²/4)` is built from
//! the reported values and referred to χ²(2).

use serde::Serialize;

use crate::market_data::ReturnSeries;
use crate::stats::{chi2_sf, mean, ols_with_intercept, sample_sd};
use crate::{Error, Result};

pub const DEFAULT_ARCH_LAGS: usize = 4;
pub const MIN_SUMMARY_OBS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    pub stdev: f64,
    pub min: f64,
    pub max: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub bj_stat: f64,
    pub bj_p: f64,
    pub lm_stat: f64,
    pub lm_p: f64,
}

/// Bias-adjusted skewness and excess kurtosis.
pub fn skew_kurtosis(xs: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len();
    if n < 4 {
        return Err(Error::InsufficientData {
            what: "skewness/kurtosis",
            needed: 4,
            got: n,
        });
    }
    let nf = n as f64;
    let m = mean(xs);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in xs {
        let d = x - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    let scale = xs.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if !(m2 > (1e-14 * scale).powi(2)) {
        return Err(Error::DegenerateInput("series has zero variance".into()));
    }
    let g1 = m3 / m2.powf(1.5);
    let g2 = m4 / (m2 * m2) - 3.0;
    let skew = g1 * (nf * (nf - 1.0)).sqrt() / (nf - 2.0);
    let kurt = ((nf + 1.0) * g2 + 6.0) * (nf - 1.0) / ((nf - 2.0) * (nf - 3.0));
    Ok((skew, kurt))
}

/// Bera–Jarque statistic and χ²(2) p-value.
pub fn bera_jarque(xs: &[f64]) -> Result<(f64, f64)> {
    let (s, k) = skew_kurtosis(xs)?;
    let stat = xs.len() as f64 / 6.0 * (s * s + k * k / 4.0);
    Ok((stat, chi2_sf(stat, 2.0)))
}

/// Engle's LM test: regress squared demeaned returns on `lags` of themselves;
/// the statistic `T·R²` (T = usable observations) is referred to χ²(lags).
pub fn lm_arch(r: &ReturnSeries, lags: usize) -> Result<(f64, f64)> {
    lm_arch_values(r.values(), lags)
}

pub fn lm_arch_values(xs: &[f64], lags: usize) -> Result<(f64, f64)> {
    if lags == 0 {
        return Err(Error::Domain("ARCH test needs at least one lag".into()));
    }
    let needed = lags + 2;
    if xs.len() < needed {
        return Err(Error::InsufficientData {
            what: "ARCH LM test",
            needed,
            got: xs.len(),
        });
    }
    let m = mean(xs);
    let e2: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    let y = e2[lags..].to_vec();
    let regressors: Vec<Vec<f64>> = (1..=lags)
        .map(|l| e2[lags - l..e2.len() - l].to_vec())
        .collect();
    let fit = ols_with_intercept(&y, &regressors).map_err(|e| match e {
        Error::DegenerateInput(_) => {
            Error::DegenerateInput("squared residuals have no variation".into())
        }
        other => other,
    })?;
    let stat = (y.len() as f64 * fit.r_squared).max(0.0);
    Ok((stat, chi2_sf(stat, lags as f64)))
}

pub fn summarize(r: &ReturnSeries) -> Result<SummaryStats> {
    summarize_values(r.values())
}

pub fn summarize_values(xs: &[f64]) -> Result<SummaryStats> {
    if xs.len() < MIN_SUMMARY_OBS {
        return Err(Error::InsufficientData {
            what: "summary statistics",
            needed: MIN_SUMMARY_OBS,
            got: xs.len(),
        });
    }
    let (skewness, excess_kurtosis) = skew_kurtosis(xs)?;
    let n = xs.len();
    let bj_stat = n as f64 / 6.0 * (skewness.powi(2) + excess_kurtosis.powi(2) / 4.0);
    let (lm_stat, lm_p) = lm_arch_values(xs, DEFAULT_ARCH_LAGS)?;
    Ok(SummaryStats {
        n,
        mean: mean(xs),
        stdev: sample_sd(xs),
        min: xs.iter().copied().fold(f64::INFINITY, f64::min),
        max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        skewness,
        excess_kurtosis,
        bj_stat,
        bj_p: chi2_sf(bj_stat, 2.0),
        lm_stat,
        lm_p,
    })
}

/// Two-sided χ² significance of skewness/kurtosis at `level`, used for the
/// star columns. Skewness and kurtosis are tested with their asymptotic
/// standard errors sqrt(6/n) and sqrt(24/n).
pub fn moment_significance(stats: &SummaryStats, level: f64) -> (bool, bool) {
    let n = stats.n as f64;
    let zs = stats.skewness / (6.0 / n).sqrt();
    let zk = stats.excess_kurtosis / (24.0 / n).sqrt();
    (chi2_sf(zs * zs, 1.0) < level, chi2_sf(zk * zk, 1.0) < level)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_is_degenerate() {
        let xs = vec![0.01; 20];
        assert!(matches!(
            summarize_values(&xs),
            Err(Error::DegenerateInput(_))
        ));
        assert!(matches!(
            lm_arch_values(&xs, 4),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn too_few_observations() {
        assert!(matches!(
            summarize_values(&[0.1, 0.2, 0.3]),
            Err(Error::InsufficientData { .. })
        ));
        assert!(matches!(
            lm_arch_values(&[0.1, -0.2, 0.3, 0.0, 0.5], 4),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn p_values_in_unit_interval() {
        let xs: Vec<f64> = (0..40)
            .map(|i| ((i * 37 % 11) as f64 - 5.0) / 10.0)
            .collect();
        let s = summarize_values(&xs).unwrap();
        assert!((0.0..=1.0).contains(&s.bj_p));
        assert!((0.0..=1.0).contains(&s.lm_p));
        assert!(s.min <= s.mean && s.mean <= s.max);
        assert!(s.lm_stat >= 0.0);
    }
}

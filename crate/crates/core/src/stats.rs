//! Small sample-statistics helpers shared by the estimators.
//!
//! Variances and covariances use the (n − 1) denominator throughout.

use nalgebra::{DMatrix, DVector};
use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};

use crate::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn sample_covariance(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    let mx = mean(xs);
    let my = mean(ys);
    xs.iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / (xs.len() as f64 - 1.0)
}

pub fn sample_sd(xs: &[f64]) -> f64 {
    sample_variance(xs).sqrt()
}

/// Ordinary least squares with an intercept.
#[derive(Debug, Clone)]
pub struct OlsFit {
    /// Intercept first, then one slope per regressor column.
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
    pub residual_variance: f64,
    pub n: usize,
}

/// Regress `y` on an intercept plus `regressors` (each a column of length `y.len()`).
pub fn ols_with_intercept(y: &[f64], regressors: &[Vec<f64>]) -> Result<OlsFit> {
    let n = y.len();
    let k = regressors.len() + 1;
    if n <= k {
        return Err(Error::InsufficientData {
            what: "least squares",
            needed: k + 1,
            got: n,
        });
    }
    let x = DMatrix::from_fn(n, k, |i, j| if j == 0 { 1.0 } else { regressors[j - 1][i] });
    let yv = DVector::from_column_slice(y);
    let xtx = x.transpose() * &x;
    let xty = x.transpose() * &yv;
    let chol = xtx
        .cholesky()
        .ok_or_else(|| Error::DegenerateInput("regressor matrix is singular".into()))?;
    let beta = chol.solve(&xty);
    let fitted = &x * &beta;
    let ybar = mean(y);
    let sse: f64 = y
        .iter()
        .zip(fitted.iter())
        .map(|(a, f)| (a - f).powi(2))
        .sum();
    let sst: f64 = y.iter().map(|a| (a - ybar).powi(2)).sum();
    if !(sst > 0.0) {
        return Err(Error::DegenerateInput("response has zero variance".into()));
    }
    Ok(OlsFit {
        coefficients: beta.iter().copied().collect(),
        r_squared: 1.0 - sse / sst,
        residual_variance: sse / (n - k) as f64,
        n,
    })
}

/// Upper-tail probability of a χ²(df) variate.
pub fn chi2_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df).expect("positive degrees of freedom");
    dist.sf(x).clamp(0.0, 1.0)
}

/// Two-sided p-value of a Student-t statistic.
pub fn t_two_sided(t: f64, df: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0)
}

//! Hedged-portfolio returns and the two hedge ratios.
//!
//! A short hedger holds the spot and sells β futures, a long hedger is short the
//! spot and buys β futures:
//!
//! ```text
//! short: R_p = +r_s − β·r_f
//! long:  R_p = −r_s + β·r_f
//! ```
//!
//! MVHR = σ_sf / σ²_f. The RAHR maximizes E(R_p) − λ·Var(R_p); its first-order
//! condition adds a speculative term of opposite sign for the two sides:
//!
//! ```text
//! short: β = σ_sf/σ²_f − E(r_f) / (2λσ²_f)
//! long:  β = σ_sf/σ²_f + E(r_f) / (2λσ²_f)
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::market_data::{same_dates, ReturnSeries};
use crate::stats::{mean, sample_covariance, sample_variance};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HedgerSide {
    Short,
    Long,
}

impl HedgerSide {
    pub const BOTH: [HedgerSide; 2] = [HedgerSide::Short, HedgerSide::Long];

    /// +1 for short (long the spot), −1 for long.
    pub fn spot_sign(self) -> f64 {
        match self {
            HedgerSide::Short => 1.0,
            HedgerSide::Long => -1.0,
        }
    }
}

impl fmt::Display for HedgerSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HedgerSide::Short => "short",
            HedgerSide::Long => "long",
        })
    }
}

impl FromStr for HedgerSide {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "short" => Ok(HedgerSide::Short),
            "long" => Ok(HedgerSide::Long),
            other => Err(Error::validation(format!("unknown hedger side '{other}'"))),
        }
    }
}

/// Inputs to the hedge-ratio formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub e_rf: f64,
    pub var_f: f64,
    pub cov_sf: f64,
    pub var_s: Option<f64>,
}

impl MomentSet {
    pub fn new(e_rf: f64, var_f: f64, cov_sf: f64, var_s: Option<f64>) -> Result<Self> {
        let m = Self {
            e_rf,
            var_f,
            cov_sf,
            var_s,
        };
        m.validate()?;
        Ok(m)
    }

    /// Sample moments of an aligned spot/futures window.
    pub fn from_sample(spot: &[f64], futures: &[f64]) -> Result<Self> {
        if spot.len() != futures.len() {
            return Err(Error::Alignment(format!(
                "spot has {} observations, futures {}",
                spot.len(),
                futures.len()
            )));
        }
        if spot.len() < 3 {
            return Err(Error::InsufficientData {
                what: "hedge moments",
                needed: 3,
                got: spot.len(),
            });
        }
        Self::new(
            mean(futures),
            sample_variance(futures),
            sample_covariance(spot, futures),
            Some(sample_variance(spot)),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.var_f > 0.0 && self.var_f.is_finite()) {
            return Err(Error::DegenerateInput(format!(
                "futures variance {} must be > 0",
                self.var_f
            )));
        }
        if let Some(vs) = self.var_s {
            // small slack for rounding in the sample covariance
            if self.cov_sf.abs() > (vs * self.var_f).sqrt() * (1.0 + 1e-9) {
                return Err(Error::validation("|cov_sf| exceeds sd_s·sd_f"));
            }
        }
        Ok(())
    }

    pub fn minimum_variance_ratio(&self) -> f64 {
        self.cov_sf / self.var_f
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum HedgeKind {
    Rahr,
    Mvhr,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HedgeRatio {
    pub beta: f64,
    pub kind: HedgeKind,
}

/// Hedged-portfolio return for a single period.
pub fn portfolio_return(r_s: f64, r_f: f64, beta: f64, side: HedgerSide) -> f64 {
    side.spot_sign() * (r_s - beta * r_f)
}

/// Hedged returns with a constant β.
pub fn portfolio_returns(
    spot: &ReturnSeries,
    futures: &ReturnSeries,
    beta: f64,
    side: HedgerSide,
) -> Result<ReturnSeries> {
    if !same_dates(spot, futures) {
        return Err(Error::Alignment(
            "spot and futures returns cover different dates".into(),
        ));
    }
    let values = spot
        .values()
        .iter()
        .zip(futures.values())
        .map(|(&s, &f)| portfolio_return(s, f, beta, side))
        .collect();
    ReturnSeries::new(spot.frequency, spot.dates().to_vec(), values)
}

pub fn mvhr(spot: &ReturnSeries, futures: &ReturnSeries) -> Result<HedgeRatio> {
    if !same_dates(spot, futures) {
        return Err(Error::Alignment(
            "spot and futures returns cover different dates".into(),
        ));
    }
    mvhr_values(spot.values(), futures.values())
}

pub fn mvhr_values(spot: &[f64], futures: &[f64]) -> Result<HedgeRatio> {
    if spot.len() < 3 {
        return Err(Error::InsufficientData {
            what: "MVHR",
            needed: 3,
            got: spot.len(),
        });
    }
    let var_f = sample_variance(futures);
    if !(var_f > 0.0) {
        return Err(Error::DegenerateInput(
            "futures returns have zero variance".into(),
        ));
    }
    Ok(HedgeRatio {
        beta: sample_covariance(spot, futures) / var_f,
        kind: HedgeKind::Mvhr,
    })
}

/// Utility-maximizing hedge ratio for risk aversion `lambda`.
pub fn rahr(moments: &MomentSet, lambda: f64, side: HedgerSide) -> Result<HedgeRatio> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!(
            "risk aversion must be > 0, got {lambda}"
        )));
    }
    if !(moments.var_f > 0.0) {
        return Err(Error::DegenerateInput(format!(
            "futures variance {} must be > 0",
            moments.var_f
        )));
    }
    let speculative = moments.e_rf / (2.0 * lambda * moments.var_f);
    let beta = moments.minimum_variance_ratio() - side.spot_sign() * speculative;
    Ok(HedgeRatio {
        beta,
        kind: HedgeKind::Rahr,
    })
}

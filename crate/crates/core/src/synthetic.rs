//! Seeded GARCH(1,1)-M simulator.
//!
//! Random numbers are portable by construction:
//!
//! 1. `ChaCha8Rng::seed_from_u64(seed)` (rand_chacha 0.3) produces `u64` words;
//! 2. a uniform is `(word >> 11) · 2⁻⁵³`;
//! 3. normals come in Box–Muller pairs from two uniforms `u1, u2`:
//!    `sqrt(−2·ln(1−u1))·cos(2π·u2)` then `…·sin(2π·u2)`.
//!
//! The recursion starts at the unconditional variance and discards the first
//! [`BURN_IN`] draws. For a pair, each step consumes `z` (spot) then `w`, and the
//! futures shock is `σ_t·(ρ·z + sqrt(1−ρ²)·w)`, so both series share σ²_t.

use chrono::{Datelike, Days, Months, NaiveDate};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::garch::GarchParams;
use crate::market_data::{ContractSeries, Frequency, PricePoint, ReturnSeries};
use crate::{Error, Result};

pub const BURN_IN: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub n: usize,
    pub mu: f64,
    pub lambda: f64,
    pub params: GarchParams,
    pub seed: u64,
    /// Correlation of the companion (futures) series, if one is wanted.
    pub pair_correlation: Option<f64>,
    /// Mean intercept of the companion series; defaults to `mu`.
    pub drift_f: Option<f64>,
    pub frequency: Frequency,
    /// Date of the initial price; returns start one period later.
    pub start: NaiveDate,
}

impl SimSpec {
    pub fn new(n: usize, mu: f64, lambda: f64, params: GarchParams, seed: u64) -> Self {
        Self {
            n,
            mu,
            lambda,
            params,
            seed,
            pair_correlation: None,
            drift_f: None,
            frequency: Frequency::Weekly,
            start: NaiveDate::from_ymd_opt(1992, 2, 19).expect("valid date"),
        }
    }

    pub fn with_pair(mut self, rho: f64, drift_f: Option<f64>) -> Self {
        self.pair_correlation = Some(rho);
        self.drift_f = drift_f;
        self
    }

    pub fn with_calendar(mut self, frequency: Frequency, start: NaiveDate) -> Self {
        self.frequency = frequency;
        self.start = start;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::validation("simulation length must be ≥ 1"));
        }
        self.params.validate()?;
        if !(self.mu.is_finite() && self.lambda.is_finite()) {
            return Err(Error::validation("mu and lambda must be finite"));
        }
        if let Some(rho) = self.pair_correlation {
            if !(rho.abs() < 1.0) {
                return Err(Error::validation(format!(
                    "|rho|={} must be < 1",
                    rho.abs()
                )));
            }
        }
        if let Some(d) = self.drift_f {
            if !d.is_finite() {
                return Err(Error::validation("drift_f must be finite"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulated {
    pub returns: ReturnSeries,
    pub companion: Option<ReturnSeries>,
    pub sigma2: Vec<f64>,
}

/// Standard normals from a ChaCha8 stream via Box–Muller.
pub struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let radius = (-2.0 * (1.0 - u1).ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }
}

/// `count` consecutive calendar dates: every 7 days, or successive month-ends.
pub fn calendar(frequency: Frequency, start: NaiveDate, count: usize) -> Vec<NaiveDate> {
    match frequency {
        Frequency::Weekly => (0..count as u64)
            .map(|k| start + Days::new(7 * k))
            .collect(),
        Frequency::Monthly => {
            let first = NaiveDate::from_ymd_opt(start.year(), start.month(), 1).expect("valid");
            (0..count as u32)
                .map(|k| first + Months::new(k + 1) - Days::new(1))
                .collect()
        }
    }
}

pub fn simulate(spec: &SimSpec) -> Result<Simulated> {
    spec.validate()?;
    let GarchParams { c, a, b } = spec.params;
    let rho = spec.pair_correlation;
    let drift_f = spec.drift_f.unwrap_or(spec.mu);
    let mut normals = NormalStream::new(spec.seed);

    let mut h = spec.params.unconditional_variance();
    let mut e_prev = 0.0;
    let mut r = Vec::with_capacity(spec.n);
    let mut rf = Vec::with_capacity(if rho.is_some() { spec.n } else { 0 });
    let mut sigma2 = Vec::with_capacity(spec.n);

    for t in 0..BURN_IN + spec.n {
        if t > 0 {
            h = c + a * e_prev * e_prev + b * h;
        }
        let sd = h.sqrt();
        let z = normals.next_normal();
        let e = sd * z;
        let companion = rho.map(|rho| {
            let w = normals.next_normal();
            drift_f + spec.lambda * h + sd * (rho * z + (1.0 - rho * rho).sqrt() * w)
        });
        if t >= BURN_IN {
            r.push(spec.mu + spec.lambda * h + e);
            sigma2.push(h);
            if let Some(x) = companion {
                rf.push(x);
            }
        }
        e_prev = e;
    }

    let dates = calendar(spec.frequency, spec.start, spec.n + 1)[1..].to_vec();
    let returns = ReturnSeries::new(spec.frequency, dates.clone(), r)?;
    let companion = match rho {
        Some(_) => Some(ReturnSeries::new(spec.frequency, dates, rf)?),
        None => None,
    };
    Ok(Simulated {
        returns,
        companion,
        sigma2,
    })
}

/// Price path P_0·exp(cumulative returns) on the series' calendar, with `p0`
/// dated one period before the first return.
pub fn prices_from_returns(
    r: &ReturnSeries,
    p0: f64,
    start: NaiveDate,
    volume: Option<u64>,
) -> Vec<PricePoint> {
    let mut out = Vec::with_capacity(r.len() + 1);
    out.push(PricePoint {
        date: start,
        price: p0,
        volume,
    });
    let mut log_p = p0.ln();
    for (date, x) in r.iter() {
        log_p += x;
        out.push(PricePoint {
            date,
            price: log_p.exp(),
            volume,
        });
    }
    out
}

/// Single-contract futures file content for a simulated futures return path.
pub fn synthetic_contract(r: &ReturnSeries, p0: f64, start: NaiveDate) -> ContractSeries {
    ContractSeries {
        contract_id: "SYN".into(),
        points: prices_from_returns(r, p0, start, Some(1000)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normals_have_unit_moments() {
        let mut s = NormalStream::new(7);
        let xs: Vec<f64> = (0..200_000).map(|_| s.next_normal()).collect();
        let m = crate::stats::mean(&xs);
        let v = crate::stats::sample_variance(&xs);
        assert!(m.abs() < 0.01, "{m}");
        assert!((v - 1.0).abs() < 0.01, "{v}");
    }

    #[test]
    fn month_end_calendar() {
        let d = calendar(
            Frequency::Monthly,
            NaiveDate::from_ymd_opt(1992, 1, 31).unwrap(),
            3,
        );
        assert_eq!(
            d,
            vec![
                NaiveDate::from_ymd_opt(1992, 1, 31).unwrap(),
                NaiveDate::from_ymd_opt(1992, 2, 29).unwrap(),
                NaiveDate::from_ymd_opt(1992, 3, 31).unwrap(),
            ]
        );
    }

    #[test]
    fn invalid_specs_rejected() {
        let p = GarchParams {
            c: 1e-5,
            a: 0.5,
            b: 0.6,
        };
        assert!(simulate(&SimSpec::new(10, 0.0, 0.0, p, 1)).is_err());
        let p = GarchParams::new(1e-5, 0.05, 0.9).unwrap();
        assert!(simulate(&SimSpec::new(0, 0.0, 0.0, p, 1)).is_err());
        assert!(simulate(&SimSpec::new(10, 0.0, 0.0, p, 1).with_pair(1.0, None)).is_err());
    }
}

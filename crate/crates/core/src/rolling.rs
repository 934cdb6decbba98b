//! Rolling-window risk aversion and hedge ratios, plus one-step-ahead forecast
//! hedges.
//!
//! Each window of `length` observations ending at date t yields one record:
//! λ from a GARCH-M fit on the hedger's own exposure (spot for short hedgers,
//! futures for long hedgers), sample moments of the window, the MVHR and the
//! RAHR. The window then advances by `step` observations, so N observations give
//! `(N − length) / step + 1` records.
//!
//! Forecast records for an origin t use only records up to t: AR(1) one-step
//! forecasts of λ and E(r_f) fitted on the full history so far, the MVHR and
//! futures variance carried forward as random walks.

use std::io::{Read, Write};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::garch::{fit_garch_m, FitConfig, GarchMFit};
use crate::hedge::{rahr, HedgerSide, MomentSet};
use crate::market_data::{csv_io, same_dates, Frequency, ReturnSeries};
use crate::stats::mean;
use crate::{Error, Result};

pub const DEFAULT_LAMBDA_FLOOR: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    /// Window length in observations.
    pub length: usize,
    pub step: usize,
    /// Smallest λ used in a hedge ratio; lower estimates or forecasts are floored.
    pub lambda_floor: f64,
}

impl WindowSpec {
    pub fn new(length: usize) -> Self {
        Self {
            length,
            step: 1,
            lambda_floor: DEFAULT_LAMBDA_FLOOR,
        }
    }

    /// `years` of observations at `frequency` (52 weeks or 12 months a year).
    pub fn years(years: usize, frequency: Frequency) -> Self {
        Self::new(years * frequency.periods_per_year())
    }

    pub fn validate(&self, cfg: &FitConfig) -> Result<()> {
        if self.step == 0 {
            return Err(Error::validation("window step must be ≥ 1"));
        }
        if self.length < cfg.min_observations {
            return Err(Error::InsufficientData {
                what: "estimation window",
                needed: cfg.min_observations,
                got: self.length,
            });
        }
        if !(self.lambda_floor > 0.0) {
            return Err(Error::validation("lambda floor must be > 0"));
        }
        Ok(())
    }

    /// Number of windows over `n` observations.
    pub fn window_count(&self, n: usize) -> usize {
        if n < self.length || self.step == 0 {
            0
        } else {
            (n - self.length) / self.step + 1
        }
    }

    /// Last index of every window over `n` observations.
    pub fn window_ends(&self, n: usize) -> Vec<usize> {
        if n < self.length || self.step == 0 {
            return Vec::new();
        }
        (self.length - 1..n).step_by(self.step).collect()
    }
}

/// Inclusive date range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateSpan {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DateSpan {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if end < start {
            return Err(Error::validation(format!(
                "span end {end} precedes start {start}"
            )));
        }
        Ok(Self { start, end })
    }

    pub fn contains(&self, d: NaiveDate) -> bool {
        self.start <= d && d <= self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HedgeMode {
    #[serde(rename = "in_sample_t")]
    InSample,
    #[serde(rename = "forecast_t_plus_1")]
    Forecast,
}

impl HedgeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            HedgeMode::InSample => "in_sample_t",
            HedgeMode::Forecast => "forecast_t_plus_1",
        }
    }
}

/// One hedge decision, taken at `date` and held over the following period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HedgeRecord {
    pub date: NaiveDate,
    pub side: HedgerSide,
    /// λ used in the RAHR (estimate or forecast, after flooring).
    pub lambda: f64,
    pub moments: MomentSet,
    pub rahr: f64,
    pub mvhr: f64,
    pub mode: HedgeMode,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HedgePath {
    pub records: Vec<HedgeRecord>,
    /// Floored λ values, carried-forward fits and similar events.
    pub warnings: Vec<String>,
}

impl HedgePath {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn within(&self, span: &DateSpan) -> HedgePath {
        HedgePath {
            records: self
                .records
                .iter()
                .filter(|r| span.contains(r.date))
                .copied()
                .collect(),
            warnings: Vec::new(),
        }
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.lambda).collect()
    }

    pub fn rahrs(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.rahr).collect()
    }

    pub fn mvhrs(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.mvhr).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaEstimate {
    pub date: NaiveDate,
    pub lambda: f64,
    pub converged: bool,
    /// The window's fit failed and λ was taken from the previous window.
    pub carried_forward: bool,
}

fn check_pair(spot: &ReturnSeries, futures: &ReturnSeries) -> Result<()> {
    if !same_dates(spot, futures) {
        return Err(Error::Alignment(
            "spot and futures returns must be aligned before rolling".into(),
        ));
    }
    Ok(())
}

/// Per-window λ for one hedger type.
pub fn risk_aversion_series(
    spot: &ReturnSeries,
    futures: &ReturnSeries,
    side: HedgerSide,
    spec: &WindowSpec,
    cfg: &FitConfig,
) -> Result<Vec<LambdaEstimate>> {
    Ok(estimate_windows(spot, futures, side, spec, cfg, None)?.1)
}

fn estimate_windows(
    spot: &ReturnSeries,
    futures: &ReturnSeries,
    side: HedgerSide,
    spec: &WindowSpec,
    cfg: &FitConfig,
    span: Option<&DateSpan>,
) -> Result<(Vec<usize>, Vec<LambdaEstimate>)> {
    check_pair(spot, futures)?;
    spec.validate(cfg)?;
    let exposure = match side {
        HedgerSide::Short => spot,
        HedgerSide::Long => futures,
    };
    let n = exposure.len();
    if n < spec.length {
        return Err(Error::InsufficientData {
            what: "rolling windows",
            needed: spec.length,
            got: n,
        });
    }
    let ends: Vec<usize> = spec
        .window_ends(n)
        .into_iter()
        .filter(|&e| span.map_or(true, |s| s.contains(exposure.dates()[e])))
        .collect();
    let fits: Vec<Result<GarchMFit>> = ends
        .par_iter()
        .map(|&end| fit_garch_m(&exposure.slice(end + 1 - spec.length..end + 1), cfg))
        .collect();

    let mut out: Vec<LambdaEstimate> = Vec::with_capacity(ends.len());
    for (&end, fit) in ends.iter().zip(fits) {
        let date = exposure.dates()[end];
        let estimate = match fit {
            Ok(f) => LambdaEstimate {
                date,
                lambda: f.lambda,
                converged: true,
                carried_forward: false,
            },
            Err(e) => match (out.last(), e) {
                (Some(prev), _) => LambdaEstimate {
                    date,
                    lambda: prev.lambda,
                    converged: false,
                    carried_forward: true,
                },
                (
                    None,
                    Error::Fit {
                        best_params: Some(best),
                        ..
                    },
                ) => LambdaEstimate {
                    date,
                    lambda: best.lambda,
                    converged: false,
                    carried_forward: false,
                },
                (None, e) => return Err(e),
            },
        };
        out.push(estimate);
    }
    Ok((ends, out))
}

/// Rolling in-sample hedges for one hedger type.
pub fn rolling_hedges(
    spot: &ReturnSeries,
    futures: &ReturnSeries,
    side: HedgerSide,
    spec: &WindowSpec,
    cfg: &FitConfig,
) -> Result<HedgePath> {
    rolling_hedges_within(spot, futures, side, spec, cfg, None)
}

/// As [`rolling_hedges`], keeping only windows that end inside `span`.
pub fn rolling_hedges_within(
    spot: &ReturnSeries,
    futures: &ReturnSeries,
    side: HedgerSide,
    spec: &WindowSpec,
    cfg: &FitConfig,
    span: Option<&DateSpan>,
) -> Result<HedgePath> {
    let (ends, lambdas) = estimate_windows(spot, futures, side, spec, cfg, span)?;
    let mut path = HedgePath::default();
    for (&end, est) in ends.iter().zip(&lambdas) {
        let range = end + 1 - spec.length..end + 1;
        let moments =
            MomentSet::from_sample(&spot.values()[range.clone()], &futures.values()[range])?;
        if est.carried_forward {
            path.warnings.push(format!(
                "{} {side}: fit failed, lambda carried forward from previous window",
                est.date
            ));
        }
        let lambda = floor_lambda(
            est.lambda,
            spec.lambda_floor,
            est.date,
            side,
            &mut path.warnings,
        );
        path.records.push(HedgeRecord {
            date: est.date,
            side,
            lambda,
            moments,
            rahr: rahr(&moments, lambda, side)?.beta,
            mvhr: moments.minimum_variance_ratio(),
            mode: HedgeMode::InSample,
            converged: est.converged,
        });
    }
    Ok(path)
}

fn floor_lambda(
    lambda: f64,
    floor: f64,
    date: NaiveDate,
    side: HedgerSide,
    warnings: &mut Vec<String>,
) -> f64 {
    if lambda < floor || !lambda.is_finite() {
        warnings.push(format!("{date} {side}: lambda {lambda} floored at {floor}"));
        floor
    } else {
        lambda
    }
}

/// Least-squares AR(1): y_t = φ0 + φ1·y_{t−1} + e_t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ar1Fit {
    pub phi0: f64,
    pub phi1: f64,
    pub residual_var: f64,
}

impl Ar1Fit {
    pub fn forecast(&self, last: f64) -> f64 {
        self.phi0 + self.phi1 * last
    }
}

/// A constant series is its own fixed point (φ1 = 0, φ0 = the constant).
pub fn fit_ar1(ys: &[f64]) -> Result<Ar1Fit> {
    if ys.len() < 3 {
        return Err(Error::InsufficientData {
            what: "AR(1)",
            needed: 3,
            got: ys.len(),
        });
    }
    if ys.iter().all(|&y| y == ys[0]) {
        return Ok(Ar1Fit {
            phi0: ys[0],
            phi1: 0.0,
            residual_var: 0.0,
        });
    }
    let x = &ys[..ys.len() - 1];
    let y = &ys[1..];
    let (mx, my) = (mean(x), mean(y));
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateInput("AR(1) regressor is constant".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let phi1 = sxy / sxx;
    let phi0 = my - phi1 * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - phi0 - phi1 * a).powi(2))
        .sum();
    let dof = y.len().saturating_sub(2).max(1);
    Ok(Ar1Fit {
        phi0,
        phi1,
        residual_var: sse / dof as f64,
    })
}

fn ar1_step(
    history: &[f64],
    what: &str,
    date: NaiveDate,
    warnings: &mut Vec<String>,
) -> Result<f64> {
    let last = history[history.len() - 1];
    match fit_ar1(history) {
        Ok(fit) => Ok(fit.forecast(last)),
        Err(Error::DegenerateInput(_)) => {
            warnings.push(format!(
                "{date}: AR(1) for {what} degenerate, using last value"
            ));
            Ok(last)
        }
        Err(e) => Err(e),
    }
}

/// One-step-ahead hedges for every record of `path` dated inside `origins`.
/// `path` must hold the in-sample records for one hedger type in date order;
/// records before each origin form its AR(1) history.
pub fn forecast_hedges(
    path: &HedgePath,
    spec: &WindowSpec,
    origins: &DateSpan,
) -> Result<HedgePath> {
    let mut out = HedgePath::default();
    for (idx, rec) in path.records.iter().enumerate() {
        if !origins.contains(rec.date) {
            continue;
        }
        let history = &path.records[..=idx];
        if history.len() < 3 {
            return Err(Error::InsufficientData {
                what: "forecast history",
                needed: 3,
                got: history.len(),
            });
        }
        let lambdas: Vec<f64> = history.iter().map(|r| r.lambda).collect();
        let e_rfs: Vec<f64> = history.iter().map(|r| r.moments.e_rf).collect();
        let lambda_hat = ar1_step(&lambdas, "lambda", rec.date, &mut out.warnings)?;
        let e_rf_hat = ar1_step(&e_rfs, "E(r_f)", rec.date, &mut out.warnings)?;
        let lambda_hat = floor_lambda(
            lambda_hat,
            spec.lambda_floor,
            rec.date,
            rec.side,
            &mut out.warnings,
        );
        let moments = MomentSet {
            e_rf: e_rf_hat,
            ..rec.moments
        };
        out.records.push(HedgeRecord {
            date: rec.date,
            side: rec.side,
            lambda: lambda_hat,
            moments,
            rahr: rahr(&moments, lambda_hat, rec.side)?.beta,
            mvhr: rec.mvhr,
            mode: HedgeMode::Forecast,
            converged: rec.converged,
        });
    }
    Ok(out)
}

pub const HEDGE_CSV_HEADER: [&str; 10] = [
    "date",
    "side",
    "lambda",
    "e_rf",
    "var_f",
    "cov_sf",
    "rahr",
    "mvhr",
    "mode",
    "converged",
];

pub fn write_hedge_csv<W: Write>(out: W, records: &[HedgeRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEDGE_CSV_HEADER).map_err(csv_io)?;
    for r in records {
        w.write_record([
            r.date.to_string(),
            r.side.to_string(),
            r.lambda.to_string(),
            r.moments.e_rf.to_string(),
            r.moments.var_f.to_string(),
            r.moments.cov_sf.to_string(),
            r.rahr.to_string(),
            r.mvhr.to_string(),
            r.mode.as_str().to_string(),
            r.converged.to_string(),
        ])
        .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_hedge_csv<R: Read>(source: R) -> Result<Vec<HedgeRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })?
        .iter()
        .map(str::to_string)
        .collect();
    if header != HEDGE_CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            msg: format!("expected header '{}'", HEDGE_CSV_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            msg: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let bad = |what: &str| Error::Parse {
            line,
            msg: format!("bad {what}"),
        };
        let num = |i: usize, what: &str| -> Result<f64> {
            record
                .get(i)
                .unwrap_or("")
                .parse::<f64>()
                .map_err(|_| bad(what))
        };
        let date = NaiveDate::parse_from_str(record.get(0).unwrap_or(""), "%Y-%m-%d")
            .map_err(|_| bad("date"))?;
        let side = record
            .get(1)
            .unwrap_or("")
            .parse::<HedgerSide>()
            .map_err(|_| bad("side"))?;
        let mode = match record.get(8).unwrap_or("") {
            "in_sample_t" => HedgeMode::InSample,
            "forecast_t_plus_1" => HedgeMode::Forecast,
            _ => return Err(bad("mode")),
        };
        let converged = record
            .get(9)
            .unwrap_or("")
            .parse::<bool>()
            .map_err(|_| bad("converged"))?;
        out.push(HedgeRecord {
            date,
            side,
            lambda: num(2, "lambda")?,
            moments: MomentSet {
                e_rf: num(3, "e_rf")?,
                var_f: num(4, "var_f")?,
                cov_sf: num(5, "cov_sf")?,
                var_s: None,
            },
            rahr: num(6, "rahr")?,
            mvhr: num(7, "mvhr")?,
            mode,
            converged,
        });
    }
    Ok(out)
}

//! Expected utility, hedging effectiveness and the summary reports.
//!
//! ```text
//! EU = mean(R_p) − 0.5·λ·var(R_p)        (sample variance, n − 1)
//! HE = EU(hedged) − EU(unhedged)
//! ```
//!
//! A hedge record dated t is scored on the spot and futures returns of the
//! following period, so the first return used is the one dated after the first
//! record and a record on the last return date has nothing to score.

use std::io::Write;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::hedge::{portfolio_return, HedgerSide};
use crate::market_data::{csv_io, same_dates, ReturnSeries};
use crate::rolling::{HedgeMode, HedgePath};
use crate::stats::{mean, sample_sd, sample_variance, t_two_sided};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "RAHR")]
    Rahr,
    #[serde(rename = "MVHR")]
    Mvhr,
    #[serde(rename = "NO_HEDGE")]
    NoHedge,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Rahr, Strategy::Mvhr, Strategy::NoHedge];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Rahr => "RAHR",
            Strategy::Mvhr => "MVHR",
            Strategy::NoHedge => "NO_HEDGE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyResult {
    pub strategy: Strategy,
    pub side: HedgerSide,
    pub mode: HedgeMode,
    pub n: usize,
    pub lambda_eval: f64,
    pub mean: f64,
    pub sd: f64,
    pub eu: f64,
    pub he: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub quantity: String,
    pub mean_x: f64,
    pub mean_y: f64,
    pub statistic: f64,
    pub df: f64,
    pub p_value: f64,
}

pub fn expected_utility_from_moments(mean: f64, variance: f64, lambda: f64) -> f64 {
    mean - 0.5 * lambda * variance
}

pub fn expected_utility_values(xs: &[f64], lambda: f64) -> Result<f64> {
    if xs.len() < 2 {
        return Err(Error::InsufficientData {
            what: "expected utility",
            needed: 2,
            got: xs.len(),
        });
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!(
            "evaluation lambda must be > 0, got {lambda}"
        )));
    }
    Ok(expected_utility_from_moments(
        mean(xs),
        sample_variance(xs),
        lambda,
    ))
}

pub fn expected_utility(portfolio: &ReturnSeries, lambda: f64) -> Result<f64> {
    expected_utility_values(portfolio.values(), lambda)
}

pub fn effectiveness(hedged: &ReturnSeries, unhedged: &ReturnSeries, lambda: f64) -> Result<f64> {
    if !same_dates(hedged, unhedged) {
        return Err(Error::Alignment(
            "hedged and unhedged returns cover different dates".into(),
        ));
    }
    Ok(expected_utility(hedged, lambda)? - expected_utility(unhedged, lambda)?)
}

/// Per-period portfolio returns of the three strategies along a hedge path.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizedHedges {
    pub side: HedgerSide,
    pub mode: HedgeMode,
    /// Date of the realized return (one period after the decision).
    pub dates: Vec<NaiveDate>,
    pub rahr: Vec<f64>,
    pub mvhr: Vec<f64>,
    pub no_hedge: Vec<f64>,
    /// Mean λ of the scored records.
    pub lambda_eval: f64,
}

impl RealizedHedges {
    pub fn returns(&self, strategy: Strategy) -> &[f64] {
        match strategy {
            Strategy::Rahr => &self.rahr,
            Strategy::Mvhr => &self.mvhr,
            Strategy::NoHedge => &self.no_hedge,
        }
    }
}

/// Applies each record's ratios to the next period's returns.
pub fn realize(
    spot: &ReturnSeries,
    futures: &ReturnSeries,
    path: &HedgePath,
) -> Result<RealizedHedges> {
    if !same_dates(spot, futures) {
        return Err(Error::Alignment(
            "spot and futures returns cover different dates".into(),
        ));
    }
    let first = path
        .records
        .first()
        .ok_or_else(|| Error::validation("hedge path is empty"))?;
    let (side, mode) = (first.side, first.mode);
    let dates = spot.dates();
    let mut out = RealizedHedges {
        side,
        mode,
        dates: Vec::new(),
        rahr: Vec::new(),
        mvhr: Vec::new(),
        no_hedge: Vec::new(),
        lambda_eval: f64::NAN,
    };
    let mut lambdas = Vec::new();
    let mut prev: Option<NaiveDate> = None;
    for rec in &path.records {
        if rec.side != side || rec.mode != mode {
            return Err(Error::validation("hedge path mixes hedger sides or modes"));
        }
        if prev.is_some_and(|p| rec.date <= p) {
            return Err(Error::validation(format!(
                "hedge path not increasing at {}",
                rec.date
            )));
        }
        prev = Some(rec.date);
        let idx = dates.binary_search(&rec.date).map_err(|_| {
            Error::Alignment(format!("hedge date {} is not a return date", rec.date))
        })?;
        let Some(next) = idx.checked_add(1).filter(|&i| i < dates.len()) else {
            continue;
        };
        let (rs, rf) = (spot.values()[next], futures.values()[next]);
        out.dates.push(dates[next]);
        out.rahr.push(portfolio_return(rs, rf, rec.rahr, side));
        out.mvhr.push(portfolio_return(rs, rf, rec.mvhr, side));
        out.no_hedge.push(portfolio_return(rs, rf, 0.0, side));
        lambdas.push(rec.lambda);
    }
    if out.dates.len() < 2 {
        return Err(Error::InsufficientData {
            what: "scored hedge periods",
            needed: 2,
            got: out.dates.len(),
        });
    }
    out.lambda_eval = mean(&lambdas);
    Ok(out)
}

/// RAHR, MVHR and NO_HEDGE rows for one hedger type.
pub fn score_strategies(
    spot: &ReturnSeries,
    futures: &ReturnSeries,
    path: &HedgePath,
) -> Result<Vec<StrategyResult>> {
    score_realized(&realize(spot, futures, path)?)
}

pub fn score_realized(real: &RealizedHedges) -> Result<Vec<StrategyResult>> {
    let lambda = real.lambda_eval;
    let eu_none = expected_utility_values(&real.no_hedge, lambda)?;
    Strategy::ALL
        .iter()
        .map(|&strategy| {
            let xs = real.returns(strategy);
            let eu = expected_utility_values(xs, lambda)?;
            Ok(StrategyResult {
                strategy,
                side: real.side,
                mode: real.mode,
                n: xs.len(),
                lambda_eval: lambda,
                mean: mean(xs),
                sd: sample_sd(xs),
                eu,
                he: if strategy == Strategy::NoHedge {
                    0.0
                } else {
                    eu - eu_none
                },
            })
        })
        .collect()
}

/// Welch two-sample t-test on the means of `x` and `y`.
pub fn compare_means(quantity: &str, x: &[f64], y: &[f64]) -> Result<ComparisonResult> {
    for s in [x, y] {
        if s.len() < 3 {
            return Err(Error::InsufficientData {
                what: "mean comparison",
                needed: 3,
                got: s.len(),
            });
        }
    }
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let (mx, my) = (mean(x), mean(y));
    let (qx, qy) = (sample_variance(x) / nx, sample_variance(y) / ny);
    let se2 = qx + qy;
    if !(se2 > 0.0) {
        return Err(Error::DegenerateInput(
            "both samples have zero variance".into(),
        ));
    }
    let statistic = (mx - my) / se2.sqrt();
    let df = se2 * se2 / (qx * qx / (nx - 1.0) + qy * qy / (ny - 1.0));
    let p_value = t_two_sided(statistic, df);
    Ok(ComparisonResult {
        quantity: quantity.to_string(),
        mean_x: mx,
        mean_y: my,
        statistic,
        df,
        p_value,
    })
}

/// Mean, spread and range of a path quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSummary {
    pub quantity: String,
    pub side: HedgerSide,
    pub mode: HedgeMode,
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

pub fn summarize_path(
    quantity: &str,
    side: HedgerSide,
    mode: HedgeMode,
    xs: &[f64],
) -> Result<PathSummary> {
    if xs.len() < 2 {
        return Err(Error::InsufficientData {
            what: "path summary",
            needed: 2,
            got: xs.len(),
        });
    }
    Ok(PathSummary {
        quantity: quantity.to_string(),
        side,
        mode,
        n: xs.len(),
        mean: mean(xs),
        sd: sample_sd(xs),
        min: xs.iter().copied().fold(f64::INFINITY, f64::min),
        max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Risk aversion, hedge ratio and performance tables for one frequency.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub risk_aversion: Vec<PathSummary>,
    pub hedge_ratios: Vec<PathSummary>,
    pub comparisons: Vec<ComparisonResult>,
    pub performance: Vec<StrategyResult>,
}

/// Builds the report from in-sample and forecast paths of both hedger types.
/// `paths` holds (in-sample, forecast) for short then long hedgers; either
/// element may be empty.
pub fn build_report(
    spot: &ReturnSeries,
    futures: &ReturnSeries,
    paths: &[(HedgerSide, HedgePath, HedgePath)],
) -> Result<EvaluationReport> {
    let mut report = EvaluationReport::default();
    let mut in_sample_lambdas: Vec<(HedgerSide, Vec<f64>)> = Vec::new();
    for (side, in_sample, forecast) in paths {
        for path in [in_sample, forecast] {
            if path.is_empty() {
                continue;
            }
            let mode = path.records[0].mode;
            report
                .risk_aversion
                .push(summarize_path("lambda", *side, mode, &path.lambdas())?);
            report
                .hedge_ratios
                .push(summarize_path("RAHR", *side, mode, &path.rahrs())?);
            report
                .hedge_ratios
                .push(summarize_path("MVHR", *side, mode, &path.mvhrs())?);
            report.comparisons.push(compare_means(
                &format!("RAHR vs MVHR ({side}, {})", mode.as_str()),
                &path.rahrs(),
                &path.mvhrs(),
            )?);
            report
                .performance
                .extend(score_strategies(spot, futures, path)?);
            if mode == HedgeMode::InSample {
                in_sample_lambdas.push((*side, path.lambdas()));
            }
        }
    }
    if let [(HedgerSide::Short, s), (HedgerSide::Long, l)] = in_sample_lambdas.as_slice() {
        report
            .comparisons
            .insert(0, compare_means("lambda short vs long", s, l)?);
    }
    Ok(report)
}

fn fmt(x: f64, scale: f64) -> String {
    format!("{:.6}", x * scale)
}

pub fn write_performance_csv<W: Write>(
    out: W,
    rows: &[StrategyResult],
    percent: bool,
) -> Result<()> {
    let scale = if percent { 100.0 } else { 1.0 };
    let unit = if percent { "percent" } else { "raw" };
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "mode",
        "side",
        "strategy",
        "n",
        "lambda_eval",
        "mean",
        "sd",
        "eu",
        "he",
        "units",
    ])
    .map_err(csv_io)?;
    for r in rows {
        w.write_record([
            r.mode.as_str().to_string(),
            r.side.to_string(),
            r.strategy.as_str().to_string(),
            r.n.to_string(),
            format!("{:.6}", r.lambda_eval),
            fmt(r.mean, scale),
            fmt(r.sd, scale),
            fmt(r.eu, scale),
            fmt(r.he, scale),
            unit.to_string(),
        ])
        .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(out: W, rows: &[PathSummary]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["quantity", "mode", "side", "n", "mean", "sd", "min", "max"])
        .map_err(csv_io)?;
    for r in rows {
        w.write_record([
            r.quantity.clone(),
            r.mode.as_str().to_string(),
            r.side.to_string(),
            r.n.to_string(),
            fmt(r.mean, 1.0),
            fmt(r.sd, 1.0),
            fmt(r.min, 1.0),
            fmt(r.max, 1.0),
        ])
        .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

/// Marks p < 0.01 with a star.
pub fn write_comparisons_csv<W: Write>(out: W, rows: &[ComparisonResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "quantity",
        "mean_x",
        "mean_y",
        "welch_t",
        "df",
        "p_value",
        "significant_1pct",
    ])
    .map_err(csv_io)?;
    for r in rows {
        w.write_record([
            r.quantity.clone(),
            fmt(r.mean_x, 1.0),
            fmt(r.mean_y, 1.0),
            format!("{:.4}", r.statistic),
            format!("{:.2}", r.df),
            format!("{:.6}", r.p_value),
            if r.p_value < 0.01 { "*" } else { "" }.to_string(),
        ])
        .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

/// Per-date cumulative log returns of the three strategies.
pub fn write_plot_csv<W: Write>(out: W, real: &RealizedHedges) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "date",
        "side",
        "mode",
        "cum_rahr",
        "cum_mvhr",
        "cum_no_hedge",
    ])
    .map_err(csv_io)?;
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    for i in 0..real.dates.len() {
        a += real.rahr[i];
        b += real.mvhr[i];
        c += real.no_hedge[i];
        w.write_record([
            real.dates[i].to_string(),
            real.side.to_string(),
            real.mode.as_str().to_string(),
            fmt(a, 1.0),
            fmt(b, 1.0),
            fmt(c, 1.0),
        ])
        .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_utility_value() {
        let eu = expected_utility_from_moments(0.0012, 0.059 * 0.059, 0.339);
        assert!((eu - 0.000610).abs() < 5e-7, "{eu}");
        assert_eq!(format!("{eu:.6}"), "0.000610");
    }

    #[test]
    fn zero_returns_have_zero_utility() {
        assert_eq!(expected_utility_values(&[0.0; 5], 0.4).unwrap(), 0.0);
    }

    #[test]
    fn utility_affine_in_lambda() {
        let xs = [0.01, -0.02, 0.005, 0.03, -0.01];
        let v = sample_variance(&xs);
        let e1 = expected_utility_values(&xs, 0.5).unwrap();
        let e2 = expected_utility_values(&xs, 1.5).unwrap();
        let e3 = expected_utility_values(&xs, 2.5).unwrap();
        assert!(((e2 - e1) - (-0.5 * v)).abs() < 1e-15);
        assert!(((e3 - e2) - (-0.5 * v)).abs() < 1e-15);
    }

    #[test]
    fn utility_errors() {
        assert!(matches!(
            expected_utility_values(&[0.1], 0.4),
            Err(Error::InsufficientData { .. })
        ));
        assert!(matches!(
            expected_utility_values(&[0.1, 0.2], 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn welch_identical_and_degenerate() {
        let x = [0.1, 0.3, 0.2, 0.5];
        let c = compare_means("x", &x, &x).unwrap();
        assert_eq!(c.statistic, 0.0);
        assert_eq!(c.p_value, 1.0);
        assert!(matches!(
            compare_means("x", &[1.0; 4], &[2.0; 4]),
            Err(Error::DegenerateInput(_))
        ));
    }
}

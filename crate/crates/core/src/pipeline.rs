//! End-to-end run: ingest → describe → estimate → rolling hedges → forecast
//! hedges → evaluation.
//!
//! Configuration is a flat `key = value` file (`#` starts a comment). Every key
//! can also be overridden from the command line; overrides win. All outputs are
//! built in memory and written only after every stage has succeeded, together
//! with a `manifest.json` holding the configuration hash, crate version, seed
//! and a SHA-256 of each file.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::diagnostics::{moment_significance, summarize, SummaryStats};
use crate::evaluation::{
    build_report, realize, write_comparisons_csv, write_performance_csv, write_plot_csv,
    write_summary_csv, EvaluationReport,
};
use crate::garch::{fit_garch_m, FitConfig, GarchMFit, Parameterization};
use crate::hedge::HedgerSide;
use crate::market_data::{
    align, csv_io, load_prices, roll_by_volume, to_returns, write_futures_csv, write_spot_csv,
    Frequency, LoadedPrices, PriceSeries, ReturnSeries,
};
use crate::rolling::{
    forecast_hedges, rolling_hedges_within, write_hedge_csv, DateSpan, HedgePath, WindowSpec,
    DEFAULT_LAMBDA_FLOOR,
};
use crate::synthetic::{prices_from_returns, synthetic_contract, SimSpec, Simulated};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Ingest,
    Describe,
    Estimate,
    Roll,
    Forecast,
    Evaluate,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Describe => "describe",
            Stage::Estimate => "estimate",
            Stage::Roll => "roll",
            Stage::Forecast => "forecast",
            Stage::Evaluate => "evaluate",
            Stage::Write => "write",
        })
    }
}

#[derive(Debug, thiserror::Error)]
#[error("[{stage}] {source}")]
pub struct StageError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

impl StageError {
    /// Missing, unreadable or malformed inputs and configuration.
    pub fn is_input_error(&self) -> bool {
        matches!(self.stage, Stage::Config | Stage::Ingest)
            && matches!(
                self.source,
                Error::Io(_) | Error::Parse { .. } | Error::Validation { .. }
            )
    }
}

pub trait AtStage<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageError>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageError> {
        self.map_err(|source| StageError { stage, source })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spot: Option<PathBuf>,
    pub futures: Option<PathBuf>,
    pub frequency: Frequency,
    pub window_years: usize,
    /// Window length in observations; overrides `window_years`.
    pub window: Option<usize>,
    pub step: usize,
    pub lambda_floor: f64,
    pub sides: Vec<HedgerSide>,
    pub in_sample: Option<DateSpan>,
    pub forecast: Option<DateSpan>,
    pub fit: FitConfig,
    pub table4_scale: bool,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            spot: None,
            futures: None,
            frequency: Frequency::Weekly,
            window_years: 10,
            window: None,
            step: 1,
            lambda_floor: DEFAULT_LAMBDA_FLOOR,
            sides: HedgerSide::BOTH.to_vec(),
            in_sample: None,
            forecast: None,
            fit: FitConfig::default(),
            table4_scale: false,
            out_dir: PathBuf::from("out"),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| Error::validation(format!("invalid value '{value}' for '{key}'")))
}

fn parse_date(key: &str, value: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(value, "%Y-%m-%d")
        .map_err(|_| Error::validation(format!("invalid date '{value}' for '{key}'")))
}

impl RunConfig {
    /// Parses `key = value` lines on top of the defaults.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut spans = SpanParts::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Validation {
                line: Some(i as u64 + 1),
                msg: format!("expected 'key = value', found '{line}'"),
            })?;
            cfg.set(&mut spans, k.trim(), v.trim())
                .map_err(|e| match e {
                    Error::Validation { msg, .. } => Error::Validation {
                        line: Some(i as u64 + 1),
                        msg,
                    },
                    other => other,
                })?;
        }
        cfg.finish_spans(spans)?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_kv_str(&fs::read_to_string(path)?)
    }

    /// Applies `key=value` overrides, e.g. from command-line flags.
    pub fn apply_overrides<'a>(
        &mut self,
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<()> {
        let mut spans = SpanParts::from_config(self);
        for (k, v) in pairs {
            self.set(&mut spans, k, v)?;
        }
        self.finish_spans(spans)
    }

    fn set(&mut self, spans: &mut SpanParts, key: &str, value: &str) -> Result<()> {
        match key {
            "spot" => self.spot = Some(PathBuf::from(value)),
            "futures" => self.futures = Some(PathBuf::from(value)),
            "frequency" => self.frequency = value.parse()?,
            "window_years" => self.window_years = parse(key, value)?,
            "window" => self.window = Some(parse(key, value)?),
            "step" => self.step = parse(key, value)?,
            "lambda_floor" => self.lambda_floor = parse(key, value)?,
            "sides" => {
                self.sides = value
                    .split(',')
                    .map(|s| s.parse::<HedgerSide>())
                    .collect::<Result<Vec<_>>>()?;
                self.sides.sort();
                self.sides.dedup();
            }
            "in_sample_start" => spans.in_start = Some(parse_date(key, value)?),
            "in_sample_end" => spans.in_end = Some(parse_date(key, value)?),
            "forecast_start" => spans.fc_start = Some(parse_date(key, value)?),
            "forecast_end" => spans.fc_end = Some(parse_date(key, value)?),
            "seed" => self.fit.seed = parse(key, value)?,
            "restarts" => self.fit.restarts = parse(key, value)?,
            "max_iterations" => self.fit.max_iterations = parse(key, value)?,
            "min_observations" => self.fit.min_observations = parse(key, value)?,
            "polish_iterations" => self.fit.polish_iterations = parse(key, value)?,
            "parameterization" => {
                self.fit.parameterization = match value {
                    "transformed" => Parameterization::Transformed,
                    "raw_clipped" => Parameterization::RawClipped,
                    _ => {
                        return Err(Error::validation(format!(
                            "unknown parameterization '{value}'"
                        )))
                    }
                }
            }
            "table4_scale" => self.table4_scale = parse(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            _ => return Err(Error::validation(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    fn finish_spans(&mut self, spans: SpanParts) -> Result<()> {
        self.in_sample = spans.build("in_sample", spans.in_start, spans.in_end)?;
        self.forecast = spans.build("forecast", spans.fc_start, spans.fc_end)?;
        Ok(())
    }

    pub fn window_spec(&self) -> WindowSpec {
        let length = self
            .window
            .unwrap_or_else(|| self.window_years * self.frequency.periods_per_year());
        WindowSpec {
            length,
            step: self.step,
            lambda_floor: self.lambda_floor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.spot.is_none() || self.futures.is_none() {
            return Err(Error::validation(
                "both 'spot' and 'futures' inputs are required",
            ));
        }
        if self.sides.is_empty() {
            return Err(Error::validation("no hedger sides selected"));
        }
        self.fit.validate()?;
        self.window_spec().validate(&self.fit)
    }

    /// Canonical text of every setting that affects results (the output
    /// directory is excluded so that runs into different directories agree).
    pub fn canonical(&self) -> String {
        let mut m: BTreeMap<&str, String> = BTreeMap::new();
        let path = |p: &Option<PathBuf>| {
            p.as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default()
        };
        let span = |s: &Option<DateSpan>| {
            s.map(|s| format!("{}..{}", s.start, s.end))
                .unwrap_or_default()
        };
        m.insert("spot", path(&self.spot));
        m.insert("futures", path(&self.futures));
        m.insert("frequency", self.frequency.to_string());
        m.insert("window", self.window_spec().length.to_string());
        m.insert("step", self.step.to_string());
        m.insert("lambda_floor", self.lambda_floor.to_string());
        m.insert(
            "sides",
            self.sides
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        m.insert("in_sample", span(&self.in_sample));
        m.insert("forecast", span(&self.forecast));
        m.insert("seed", self.fit.seed.to_string());
        m.insert("restarts", self.fit.restarts.to_string());
        m.insert("max_iterations", self.fit.max_iterations.to_string());
        m.insert("min_observations", self.fit.min_observations.to_string());
        m.insert("polish_iterations", self.fit.polish_iterations.to_string());
        m.insert("loglik_rel_tol", self.fit.loglik_rel_tol.to_string());
        m.insert("simplex_tol", self.fit.simplex_tol.to_string());
        m.insert(
            "parameterization",
            match self.fit.parameterization {
                Parameterization::Transformed => "transformed",
                Parameterization::RawClipped => "raw_clipped",
            }
            .to_string(),
        );
        m.insert("table4_scale", self.table4_scale.to_string());
        m.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

#[derive(Default)]
struct SpanParts {
    in_start: Option<NaiveDate>,
    in_end: Option<NaiveDate>,
    fc_start: Option<NaiveDate>,
    fc_end: Option<NaiveDate>,
}

impl SpanParts {
    fn from_config(cfg: &RunConfig) -> Self {
        Self {
            in_start: cfg.in_sample.map(|s| s.start),
            in_end: cfg.in_sample.map(|s| s.end),
            fc_start: cfg.forecast.map(|s| s.start),
            fc_end: cfg.forecast.map(|s| s.end),
        }
    }

    fn build(
        &self,
        name: &str,
        start: Option<NaiveDate>,
        end: Option<NaiveDate>,
    ) -> Result<Option<DateSpan>> {
        match (start, end) {
            (None, None) => Ok(None),
            (Some(s), Some(e)) => DateSpan::new(s, e).map(Some),
            _ => Err(Error::validation(format!(
                "{name} span needs both start and end"
            ))),
        }
    }
}

/// Spot and continuous futures returns on common dates.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketReturns {
    pub spot: ReturnSeries,
    pub futures: ReturnSeries,
    pub continuous: PriceSeries,
}

fn read_price_file(path: &Path) -> Result<LoadedPrices> {
    let file = fs::File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    load_prices(file)
}

pub fn ingest(
    spot_path: &Path,
    futures_path: &Path,
    frequency: Frequency,
) -> Result<MarketReturns> {
    let spot = match read_price_file(spot_path)? {
        LoadedPrices::Spot(s) => s,
        LoadedPrices::Futures(_) => {
            return Err(Error::validation(format!(
                "{} is a futures file, expected spot prices",
                spot_path.display()
            )))
        }
    };
    let continuous = match read_price_file(futures_path)? {
        LoadedPrices::Futures(contracts) => roll_by_volume(&contracts)?,
        LoadedPrices::Spot(s) => s,
    };
    let (spot_r, fut_r) = align(
        &to_returns(&spot, frequency)?,
        &to_returns(&continuous, frequency)?,
    )?;
    Ok(MarketReturns {
        spot: spot_r,
        futures: fut_r,
        continuous,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SideOutput {
    pub side: HedgerSide,
    pub in_sample: HedgePath,
    pub forecast: HedgePath,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub returns: MarketReturns,
    pub describe: Vec<(String, SummaryStats)>,
    pub estimates: Vec<(String, std::result::Result<GarchMFit, String>)>,
    pub sides: Vec<SideOutput>,
    pub report: EvaluationReport,
    /// File name and content, in write order.
    pub files: Vec<(String, Vec<u8>)>,
}

/// Runs every stage in memory. Nothing is written.
pub fn compute(cfg: &RunConfig) -> std::result::Result<PipelineOutput, StageError> {
    cfg.validate().at(Stage::Config)?;
    let spec = cfg.window_spec();
    let returns = ingest(
        cfg.spot.as_deref().expect("validated"),
        cfg.futures.as_deref().expect("validated"),
        cfg.frequency,
    )
    .at(Stage::Ingest)?;
    let (spot, futures) = (&returns.spot, &returns.futures);

    let describe = vec![
        ("spot".to_string(), summarize(spot).at(Stage::Describe)?),
        (
            "futures".to_string(),
            summarize(futures).at(Stage::Describe)?,
        ),
    ];

    let estimates = [("spot", spot), ("futures", futures)]
        .into_iter()
        .map(|(name, r)| {
            // a failed full-sample fit is reported, not fatal
            let fit = match fit_garch_m(r, &cfg.fit) {
                Ok(f) => Ok(f),
                Err(
                    e @ (Error::Fit { .. }
                    | Error::DegenerateInput(_)
                    | Error::InsufficientData { .. }),
                ) => Err(e.to_string()),
                Err(e) => return Err(e),
            };
            Ok((name.to_string(), fit))
        })
        .collect::<Result<Vec<_>>>()
        .at(Stage::Estimate)?;

    let mut sides = Vec::new();
    for &side in &cfg.sides {
        let roll_span = match (cfg.in_sample, cfg.forecast) {
            (Some(a), Some(b)) => Some(DateSpan {
                start: a.start.min(b.start),
                end: a.end.max(b.end),
            }),
            (a, b) => a.or(b),
        };
        let full = rolling_hedges_within(spot, futures, side, &spec, &cfg.fit, roll_span.as_ref())
            .at(Stage::Roll)?;
        let mut in_sample = match cfg.in_sample {
            Some(span) => full.within(&span),
            None => full.clone(),
        };
        in_sample.warnings = full.warnings.clone();
        let forecast = match cfg.forecast {
            Some(span) => forecast_hedges(&full, &spec, &span).at(Stage::Forecast)?,
            None => HedgePath::default(),
        };
        sides.push(SideOutput {
            side,
            in_sample,
            forecast,
        });
    }

    let triples: Vec<_> = sides
        .iter()
        .map(|s| (s.side, s.in_sample.clone(), s.forecast.clone()))
        .collect();
    let report = build_report(spot, futures, &triples).at(Stage::Evaluate)?;

    let mut out = PipelineOutput {
        returns,
        describe,
        estimates,
        sides,
        report,
        files: Vec::new(),
    };
    out.files = render(cfg, &out).at(Stage::Write)?;
    Ok(out)
}

fn render(cfg: &RunConfig, out: &PipelineOutput) -> Result<Vec<(String, Vec<u8>)>> {
    let mut files: Vec<(String, Vec<u8>)> = Vec::new();

    let mut buf = Vec::new();
    write_aligned_returns_csv(&mut buf, &out.returns.spot, &out.returns.futures)?;
    files.push(("returns.csv".into(), buf));

    let mut buf = Vec::new();
    write_describe_csv(&mut buf, &out.describe)?;
    files.push(("describe.csv".into(), buf));

    let mut buf = Vec::new();
    write_estimates_csv(&mut buf, &out.estimates)?;
    files.push(("estimates.csv".into(), buf));

    let in_sample: Vec<_> = out
        .sides
        .iter()
        .flat_map(|s| s.in_sample.records.iter().copied())
        .collect();
    let mut buf = Vec::new();
    write_hedge_csv(&mut buf, &in_sample)?;
    files.push(("hedges_in_sample.csv".into(), buf));

    let forecast: Vec<_> = out
        .sides
        .iter()
        .flat_map(|s| s.forecast.records.iter().copied())
        .collect();
    let mut buf = Vec::new();
    write_hedge_csv(&mut buf, &forecast)?;
    files.push(("hedges_forecast.csv".into(), buf));

    let mut buf = Vec::new();
    write_summary_csv(&mut buf, &out.report.risk_aversion)?;
    files.push(("risk_aversion.csv".into(), buf));

    let mut buf = Vec::new();
    write_summary_csv(&mut buf, &out.report.hedge_ratios)?;
    files.push(("hedge_ratios.csv".into(), buf));

    let mut buf = Vec::new();
    write_comparisons_csv(&mut buf, &out.report.comparisons)?;
    files.push(("comparisons.csv".into(), buf));

    let mut buf = Vec::new();
    write_performance_csv(&mut buf, &out.report.performance, cfg.table4_scale)?;
    files.push(("performance.csv".into(), buf));

    let mut plot = Vec::new();
    for s in &out.sides {
        for path in [&s.in_sample, &s.forecast] {
            if !path.is_empty() {
                let real = realize(&out.returns.spot, &out.returns.futures, path)?;
                let mut buf = Vec::new();
                write_plot_csv(&mut buf, &real)?;
                if !plot.is_empty() {
                    // drop the repeated header line
                    let cut = buf
                        .iter()
                        .position(|&b| b == b'\n')
                        .map_or(buf.len(), |i| i + 1);
                    buf.drain(..cut);
                }
                plot.extend(buf);
            }
        }
    }
    files.push(("plot_data.csv".into(), plot));

    let mut warnings = String::from("side,mode,message\n");
    for s in &out.sides {
        for (mode, path) in [
            ("in_sample_t", &s.in_sample),
            ("forecast_t_plus_1", &s.forecast),
        ] {
            for w in &path.warnings {
                warnings.push_str(&format!(
                    "{},{},\"{}\"\n",
                    s.side,
                    mode,
                    w.replace('"', "'")
                ));
            }
        }
    }
    files.push(("warnings.csv".into(), warnings.into_bytes()));

    let mut report =
        serde_json::to_vec_pretty(&out.report).map_err(|e| Error::validation(e.to_string()))?;
    report.push(b'\n');
    files.push(("report.json".into(), report));

    let manifest = Manifest {
        name: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        seed: cfg.fit.seed,
        config_hash: cfg.hash(),
        config: cfg.canonical(),
        files: files
            .iter()
            .map(|(name, bytes)| (name.clone(), hex::encode(Sha256::digest(bytes))))
            .collect(),
    };
    let mut bytes =
        serde_json::to_vec_pretty(&manifest).map_err(|e| Error::validation(e.to_string()))?;
    bytes.push(b'\n');
    files.push(("manifest.json".into(), bytes));
    Ok(files)
}

#[derive(Serialize)]
struct Manifest {
    name: &'static str,
    version: &'static str,
    seed: u64,
    config_hash: String,
    config: String,
    files: BTreeMap<String, String>,
}

/// Computes everything, then writes the files into `cfg.out_dir`.
pub fn run_pipeline(cfg: &RunConfig) -> std::result::Result<PipelineOutput, StageError> {
    let out = compute(cfg)?;
    write_outputs(&cfg.out_dir, &out.files).at(Stage::Write)?;
    Ok(out)
}

/// Writes to temporary names first, then renames, so an interrupted write
/// leaves no complete-looking file set behind.
pub fn write_outputs(dir: &Path, files: &[(String, Vec<u8>)]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut staged = Vec::with_capacity(files.len());
    for (name, bytes) in files {
        let tmp = dir.join(format!(".{name}.partial"));
        if let Err(e) = fs::write(&tmp, bytes) {
            for t in &staged {
                let _ = fs::remove_file(t);
            }
            let _ = fs::remove_file(&tmp);
            return Err(e.into());
        }
        staged.push(tmp);
    }
    for ((name, _), tmp) in files.iter().zip(&staged) {
        fs::rename(tmp, dir.join(name))?;
    }
    Ok(())
}

pub fn write_aligned_returns_csv<W: std::io::Write>(
    out: W,
    spot: &ReturnSeries,
    futures: &ReturnSeries,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "spot_log_return", "futures_log_return"])
        .map_err(csv_io)?;
    for ((d, s), f) in spot.iter().zip(futures.values()) {
        w.write_record([d.to_string(), s.to_string(), f.to_string()])
            .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_describe_csv<W: std::io::Write>(
    out: W,
    rows: &[(String, SummaryStats)],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "series",
        "n",
        "mean",
        "stdev",
        "min",
        "max",
        "skewness",
        "skew_sig",
        "excess_kurtosis",
        "kurt_sig",
        "bj_stat",
        "bj_p",
        "bj_sig",
        "lm4_stat",
        "lm4_p",
        "lm4_sig",
    ])
    .map_err(csv_io)?;
    let star = |b: bool| if b { "*" } else { "" }.to_string();
    for (name, s) in rows {
        let (skew_sig, kurt_sig) = moment_significance(s, 0.01);
        w.write_record([
            name.clone(),
            s.n.to_string(),
            format!("{:.6}", s.mean),
            format!("{:.6}", s.stdev),
            format!("{:.6}", s.min),
            format!("{:.6}", s.max),
            format!("{:.4}", s.skewness),
            star(skew_sig),
            format!("{:.4}", s.excess_kurtosis),
            star(kurt_sig),
            format!("{:.4}", s.bj_stat),
            format!("{:.6}", s.bj_p),
            star(s.bj_p < 0.01),
            format!("{:.4}", s.lm_stat),
            format!("{:.6}", s.lm_p),
            star(s.lm_p < 0.01),
        ])
        .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_estimates_csv<W: std::io::Write>(
    out: W,
    rows: &[(String, std::result::Result<GarchMFit, String>)],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "series",
        "mu",
        "lambda",
        "c",
        "a",
        "b",
        "loglik",
        "converged",
        "iterations",
        "error",
    ])
    .map_err(csv_io)?;
    for (name, fit) in rows {
        let rec = match fit {
            Ok(f) => [
                name.clone(),
                f.mu.to_string(),
                f.lambda.to_string(),
                f.params.c.to_string(),
                f.params.a.to_string(),
                f.params.b.to_string(),
                f.loglik.to_string(),
                f.converged.to_string(),
                f.iterations.to_string(),
                String::new(),
            ],
            Err(msg) => {
                let mut r: [String; 10] = Default::default();
                r[0] = name.clone();
                r[7] = "false".into();
                r[9] = msg.clone();
                r
            }
        };
        w.write_record(rec).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `spot.csv` (date,price) and `futures.csv` (single contract `SYN`) for
/// a simulated pair. Prices start at `p0_spot` and `p0_futures` on the spec's
/// start date.
pub fn write_simulated_market(
    spec: &SimSpec,
    sim: &Simulated,
    p0_spot: f64,
    p0_futures: f64,
    dir: &Path,
) -> Result<(PathBuf, PathBuf)> {
    let companion = sim
        .companion
        .as_ref()
        .ok_or_else(|| Error::validation("simulation has no futures companion series"))?;
    fs::create_dir_all(dir)?;
    let spot_path = dir.join("spot.csv");
    let fut_path = dir.join("futures.csv");
    let spot_points = prices_from_returns(&sim.returns, p0_spot, spec.start, None);
    write_spot_csv(fs::File::create(&spot_path)?, &spot_points)?;
    let contract = synthetic_contract(companion, p0_futures, spec.start);
    write_futures_csv(
        fs::File::create(&fut_path)?,
        std::slice::from_ref(&contract),
    )?;
    Ok((spot_path, fut_path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing_and_overrides() {
        let text = "
            # comment
            spot = data/spot.csv
            futures = data/fut.csv
            frequency = monthly
            in_sample_start = 2001-08-01
            in_sample_end = 2005-03-31
            sides = long, short
            seed = 9
        ";
        let mut cfg = RunConfig::from_kv_str(text).unwrap();
        assert_eq!(cfg.frequency, Frequency::Monthly);
        assert_eq!(cfg.window_spec().length, 120);
        assert_eq!(cfg.sides, vec![HedgerSide::Short, HedgerSide::Long]);
        assert_eq!(cfg.fit.seed, 9);
        assert!(cfg.forecast.is_none());
        cfg.apply_overrides([("seed", "11"), ("in_sample_end", "2004-12-31")])
            .unwrap();
        assert_eq!(cfg.fit.seed, 11);
        assert_eq!(
            cfg.in_sample.unwrap().end,
            NaiveDate::from_ymd_opt(2004, 12, 31).unwrap()
        );
    }

    #[test]
    fn config_errors() {
        let e = RunConfig::from_kv_str("spot = a\nbogus = 1\n").unwrap_err();
        assert!(matches!(e, Error::Validation { line: Some(2), .. }), "{e}");
        assert!(RunConfig::from_kv_str("no equals sign").is_err());
        assert!(RunConfig::from_kv_str("in_sample_start = 2005-01-01").is_err());
        assert!(
            RunConfig::from_kv_str("in_sample_start = 2005-01-01\nin_sample_end = 2004-01-01")
                .is_err()
        );
    }

    #[test]
    fn hash_ignores_output_directory() {
        let mut a = RunConfig::default();
        let mut b = RunConfig::default();
        a.out_dir = "x".into();
        b.out_dir = "y".into();
        assert_eq!(a.hash(), b.hash());
        b.fit.seed = 1;
        assert_ne!(a.hash(), b.hash());
    }
}

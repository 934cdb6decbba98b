use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use rahr::evaluation::{
    build_report, realize, write_comparisons_csv, write_performance_csv, write_plot_csv,
    write_summary_csv,
};
use rahr::garch::{fit_garch_m, GarchParams};
use rahr::hedge::HedgerSide;
use rahr::market_data::{write_continuous_csv, write_returns_csv};
use rahr::pipeline::{
    compute, ingest, write_aligned_returns_csv, write_describe_csv, write_estimates_csv,
    write_outputs, write_simulated_market, AtStage, RunConfig, Stage, StageError,
};
use rahr::rolling::{
    forecast_hedges, read_hedge_csv, rolling_hedges_within, write_hedge_csv, HedgeMode, HedgePath,
};
use rahr::synthetic::{simulate, SimSpec};
use rahr::{diagnostics, Error};

#[derive(Parser)]
#[command(
    name = "rahr",
    version,
    about = "Time-varying risk aversion and futures hedge ratios"
)]
struct Cli {
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// weekly or monthly
    #[arg(long, global = true)]
    frequency: Option<String>,
    /// Override any config key, e.g. --set window=260 (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Inputs {
    #[arg(long)]
    spot: Option<PathBuf>,
    #[arg(long)]
    futures: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Load prices, roll futures by volume, write aligned log returns.
    Ingest(Inputs),
    /// Summary statistics with normality and ARCH tests.
    Describe(Inputs),
    /// Full-sample GARCH(1,1)-M fits of spot and futures returns.
    EstimateGarchm(Inputs),
    /// Rolling-window risk aversion and in-sample hedge ratios.
    RollHedges(Inputs),
    /// One-step-ahead hedges from an in-sample hedge file.
    ForecastHedges {
        #[arg(long)]
        hedges: PathBuf,
        #[arg(long)]
        start: Option<NaiveDate>,
        #[arg(long)]
        end: Option<NaiveDate>,
    },
    /// Expected utility and hedging effectiveness of hedge files.
    Evaluate {
        #[command(flatten)]
        inputs: Inputs,
        /// Hedge files (in-sample and/or forecast).
        #[arg(long, required = true)]
        hedges: Vec<PathBuf>,
        /// Report mean, SD, EU and HE in percent.
        #[arg(long)]
        table4_scale: bool,
        /// Also write per-date cumulative returns.
        #[arg(long)]
        plot: bool,
    },
    /// Simulate a GARCH(1,1)-M spot/futures pair as price files.
    Simulate {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, default_value_t = 1e-5)]
        c: f64,
        #[arg(long, default_value_t = 0.05)]
        a: f64,
        #[arg(long, default_value_t = 0.90)]
        b: f64,
        #[arg(long, default_value_t = 0.9)]
        rho: f64,
        /// Futures mean intercept; defaults to mu.
        #[arg(long)]
        drift_f: Option<f64>,
        #[arg(long, default_value = "1992-02-19")]
        start: NaiveDate,
        #[arg(long, default_value_t = 100.0)]
        p0_spot: f64,
        #[arg(long, default_value_t = 100.0)]
        p0_futures: f64,
    },
    /// Whole pipeline from price files to evaluation tables.
    Run(Inputs),
}

fn load_config(cli: &Cli, inputs: Option<&Inputs>) -> Result<RunConfig, StageError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_file(p).at(Stage::Config)?,
        None => RunConfig::default(),
    };
    let mut pairs: Vec<(String, String)> = Vec::new();
    for o in &cli.overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| Error::validation(format!("--set expects KEY=VALUE, got '{o}'")))
            .at(Stage::Config)?;
        pairs.push((k.trim().into(), v.trim().into()));
    }
    if let Some(s) = cli.seed {
        pairs.push(("seed".into(), s.to_string()));
    }
    if let Some(d) = &cli.out_dir {
        pairs.push(("out_dir".into(), d.display().to_string()));
    }
    if let Some(f) = &cli.frequency {
        pairs.push(("frequency".into(), f.clone()));
    }
    if let Some(i) = inputs {
        if let Some(p) = &i.spot {
            pairs.push(("spot".into(), p.display().to_string()));
        }
        if let Some(p) = &i.futures {
            pairs.push(("futures".into(), p.display().to_string()));
        }
    }
    cfg.apply_overrides(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
        .at(Stage::Config)?;
    Ok(cfg)
}

fn market(cfg: &RunConfig) -> Result<rahr::pipeline::MarketReturns, StageError> {
    let (Some(spot), Some(futures)) = (&cfg.spot, &cfg.futures) else {
        return Err(Error::validation("both --spot and --futures are required")).at(Stage::Config);
    };
    ingest(spot, futures, cfg.frequency).at(Stage::Ingest)
}

fn csv_file(
    name: &str,
    f: impl FnOnce(&mut Vec<u8>) -> rahr::Result<()>,
) -> rahr::Result<(String, Vec<u8>)> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok((name.to_string(), buf))
}

fn read_hedges(path: &PathBuf) -> Result<Vec<rahr::rolling::HedgeRecord>, StageError> {
    let file = fs::File::open(path)
        .map_err(|e| {
            Error::Io(std::io::Error::new(
                e.kind(),
                format!("{}: {e}", path.display()),
            ))
        })
        .at(Stage::Ingest)?;
    read_hedge_csv(file).at(Stage::Ingest)
}

/// Splits records into one path per (side, mode), in file order.
fn group(records: Vec<rahr::rolling::HedgeRecord>) -> Vec<HedgePath> {
    let mut out: Vec<HedgePath> = Vec::new();
    for r in records {
        match out
            .iter_mut()
            .find(|p| p.records[0].side == r.side && p.records[0].mode == r.mode)
        {
            Some(p) => p.records.push(r),
            None => out.push(HedgePath {
                records: vec![r],
                warnings: vec![],
            }),
        }
    }
    out
}

fn execute(cli: &Cli) -> Result<(), StageError> {
    let files: Vec<(String, Vec<u8>)>;
    let cfg;
    match &cli.command {
        Command::Ingest(inputs) => {
            cfg = load_config(cli, Some(inputs))?;
            let m = market(&cfg)?;
            files = vec![
                csv_file("returns.csv", |b| {
                    write_aligned_returns_csv(b, &m.spot, &m.futures)
                }),
                csv_file("spot_returns.csv", |b| write_returns_csv(b, &m.spot)),
                csv_file("futures_returns.csv", |b| write_returns_csv(b, &m.futures)),
                csv_file("continuous_futures.csv", |b| {
                    write_continuous_csv(b, &m.continuous)
                }),
            ]
            .into_iter()
            .collect::<rahr::Result<_>>()
            .at(Stage::Write)?;
        }
        Command::Describe(inputs) => {
            cfg = load_config(cli, Some(inputs))?;
            let m = market(&cfg)?;
            let rows = vec![
                (
                    "spot".to_string(),
                    diagnostics::summarize(&m.spot).at(Stage::Describe)?,
                ),
                (
                    "futures".to_string(),
                    diagnostics::summarize(&m.futures).at(Stage::Describe)?,
                ),
            ];
            let mut json = serde_json::to_vec_pretty(&rows)
                .map_err(|e| Error::validation(e.to_string()))
                .at(Stage::Write)?;
            json.push(b'\n');
            files = vec![
                csv_file("describe.csv", |b| write_describe_csv(b, &rows)).at(Stage::Write)?,
                ("describe.json".to_string(), json),
            ];
        }
        Command::EstimateGarchm(inputs) => {
            cfg = load_config(cli, Some(inputs))?;
            let m = market(&cfg)?;
            let rows: Vec<_> = [("spot", &m.spot), ("futures", &m.futures)]
                .into_iter()
                .map(|(name, r)| {
                    (
                        name.to_string(),
                        fit_garch_m(r, &cfg.fit).map_err(|e| e.to_string()),
                    )
                })
                .collect();
            for (name, fit) in &rows {
                if let Err(e) = fit {
                    warn!("{name}: {e}");
                }
            }
            files =
                vec![csv_file("estimates.csv", |b| write_estimates_csv(b, &rows))
                    .at(Stage::Write)?];
        }
        Command::RollHedges(inputs) => {
            cfg = load_config(cli, Some(inputs))?;
            cfg.validate().at(Stage::Config)?;
            let m = market(&cfg)?;
            let spec = cfg.window_spec();
            let mut records = Vec::new();
            let mut warnings = String::from("side,message\n");
            for &side in &cfg.sides {
                let path = rolling_hedges_within(
                    &m.spot,
                    &m.futures,
                    side,
                    &spec,
                    &cfg.fit,
                    cfg.in_sample.as_ref(),
                )
                .at(Stage::Roll)?;
                info!("{side}: {} in-sample hedges", path.len());
                for w in &path.warnings {
                    warnings.push_str(&format!("{side},\"{w}\"\n"));
                }
                records.extend(path.records);
            }
            files = vec![
                csv_file("hedges_in_sample.csv", |b| write_hedge_csv(b, &records))
                    .at(Stage::Write)?,
                ("warnings.csv".to_string(), warnings.into_bytes()),
            ];
        }
        Command::ForecastHedges { hedges, start, end } => {
            cfg = load_config(cli, None)?;
            let span = match (start, end, cfg.forecast) {
                (Some(s), Some(e), _) => rahr::rolling::DateSpan::new(*s, *e).at(Stage::Config)?,
                (None, None, Some(span)) => span,
                _ => {
                    return Err(Error::validation(
                        "forecast span needs --start and --end or forecast_start/forecast_end",
                    ))
                    .at(Stage::Config)
                }
            };
            let spec = cfg.window_spec();
            let mut records = Vec::new();
            for path in group(read_hedges(hedges)?) {
                if path.records[0].mode != HedgeMode::InSample {
                    continue;
                }
                let fc = forecast_hedges(&path, &spec, &span).at(Stage::Forecast)?;
                info!("{}: {} forecast hedges", path.records[0].side, fc.len());
                records.extend(fc.records);
            }
            files = vec![
                csv_file("hedges_forecast.csv", |b| write_hedge_csv(b, &records))
                    .at(Stage::Write)?,
            ];
        }
        Command::Evaluate {
            inputs,
            hedges,
            table4_scale,
            plot,
        } => {
            cfg = load_config(cli, Some(inputs))?;
            let m = market(&cfg)?;
            let mut records = Vec::new();
            for h in hedges {
                records.extend(read_hedges(h)?);
            }
            let paths = group(records);
            let mut triples: Vec<(HedgerSide, HedgePath, HedgePath)> = Vec::new();
            for side in HedgerSide::BOTH {
                let pick = |mode| {
                    paths
                        .iter()
                        .find(|p| p.records[0].side == side && p.records[0].mode == mode)
                        .cloned()
                        .unwrap_or_default()
                };
                let (ins, fc) = (pick(HedgeMode::InSample), pick(HedgeMode::Forecast));
                if !(ins.is_empty() && fc.is_empty()) {
                    triples.push((side, ins, fc));
                }
            }
            let report = build_report(&m.spot, &m.futures, &triples).at(Stage::Evaluate)?;
            let scale = *table4_scale || cfg.table4_scale;
            let mut out = vec![
                csv_file("risk_aversion.csv", |b| {
                    write_summary_csv(b, &report.risk_aversion)
                }),
                csv_file("hedge_ratios.csv", |b| {
                    write_summary_csv(b, &report.hedge_ratios)
                }),
                csv_file("comparisons.csv", |b| {
                    write_comparisons_csv(b, &report.comparisons)
                }),
                csv_file("performance.csv", |b| {
                    write_performance_csv(b, &report.performance, scale)
                }),
            ]
            .into_iter()
            .collect::<rahr::Result<Vec<_>>>()
            .at(Stage::Write)?;
            if *plot {
                for p in &paths {
                    let real = realize(&m.spot, &m.futures, p).at(Stage::Evaluate)?;
                    let name = format!("plot_{}_{}.csv", real.side, real.mode.as_str());
                    out.push(csv_file(&name, |b| write_plot_csv(b, &real)).at(Stage::Write)?);
                }
            }
            files = out;
        }
        Command::Simulate {
            n,
            mu,
            lambda,
            c,
            a,
            b,
            rho,
            drift_f,
            start,
            p0_spot,
            p0_futures,
        } => {
            cfg = load_config(cli, None)?;
            let params = GarchParams::new(*c, *a, *b).at(Stage::Config)?;
            let spec = SimSpec::new(*n, *mu, *lambda, params, cfg.fit.seed)
                .with_pair(*rho, *drift_f)
                .with_calendar(cfg.frequency, *start);
            let sim = simulate(&spec).at(Stage::Config)?;
            let (s, f) = write_simulated_market(&spec, &sim, *p0_spot, *p0_futures, &cfg.out_dir)
                .at(Stage::Write)?;
            info!("wrote {} and {}", s.display(), f.display());
            return Ok(());
        }
        Command::Run(inputs) => {
            cfg = load_config(cli, Some(inputs))?;
            let out = compute(&cfg)?;
            for s in &out.sides {
                info!(
                    "{}: {} in-sample, {} forecast hedges",
                    s.side,
                    s.in_sample.len(),
                    s.forecast.len()
                );
            }
            files = out.files;
        }
    }
    write_outputs(&cfg.out_dir, &files).at(Stage::Write)?;
    for (name, _) in &files {
        println!("{}", cfg.out_dir.join(name).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}

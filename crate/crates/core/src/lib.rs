//! Time-varying relative risk aversion of hedgers and utility-based futures hedging.
//!
//! The crate estimates a coefficient of relative risk aversion (CRRA) from price
//! data with a GARCH(1,1)-in-Mean model, then uses it to build, forecast and score
//! risk-aversion hedge ratios (RAHR) against minimum-variance hedge ratios (MVHR)
//! for short and long hedgers.
//!
//! Pipeline, bottom-up:
//! - [`market_data`]: CSV ingestion, volume roll, weekly/monthly log returns
//! - [`diagnostics`]: moments, Bera–Jarque and Engle LM ARCH tests
//! - [`garch`]: Gaussian ML estimation of GARCH(1,1) and GARCH(1,1)-M
//! - [`hedge`]: hedged-portfolio returns, MVHR, RAHR
//! - [`rolling`]: rolling-window CRRA and hedges, AR(1)/random-walk forecasts
//! - [`evaluation`]: expected utility, hedging effectiveness, report tables
//! - [`synthetic`]: seeded GARCH-M simulator used as ground truth
//! - [`pipeline`]: end-to-end orchestration behind the `rahr` binary

pub mod diagnostics;
pub mod error;
pub mod evaluation;
pub mod garch;
pub mod hedge;
pub mod market_data;
pub mod pipeline;
pub mod rolling;
pub mod stats;
pub mod synthetic;

pub use error::{Error, Result};

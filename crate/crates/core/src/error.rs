use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error("validation error{}: {msg}", .line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Validation { line: Option<u64>, msg: String },

    #[error("insufficient data for {what}: need {needed}, got {got}")]
    InsufficientData {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("no contract quoted on {0}")]
    Coverage(NaiveDate),

    #[error("alignment error: {0}")]
    Alignment(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("fit did not converge after {iterations} iterations (best loglik {best_loglik})")]
    Fit {
        best_loglik: f64,
        iterations: usize,
        best_params: Option<Box<crate::garch::GarchMFit>>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation {
            line: None,
            msg: msg.into(),
        }
    }
}

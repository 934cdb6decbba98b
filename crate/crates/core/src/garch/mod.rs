//! Gaussian maximum-likelihood estimation of GARCH(1,1) and GARCH(1,1)-in-Mean.
//!
//! Mean and variance equations:
//!
//! ```text
//! r_t   = μ + λ·σ²_t + ε_t,      ε_t | past ~ N(0, σ²_t)
//! σ²_t  = c + a·ε²_{t−1} + b·σ²_{t−1}
//! ```
//!
//! The conditional variance enters the mean contemporaneously. σ²_0 is the
//! sample variance of the estimation window. The coefficient λ on σ²_t is the
//! risk premium per unit of variance, read as the coefficient of relative risk
//! aversion. Plain GARCH is the restriction λ = 0.
//!
//! The likelihood is maximized with a Nelder–Mead simplex over a transformed
//! space where every point is admissible (log for c, logistic maps for the
//! persistence a+b and the ARCH share a/(a+b)), followed by a damped Newton polish.
//! A GARCH-M fit always includes the plain-GARCH optimum among its starting
//! points, so its log-likelihood is never below the nested model's.

mod simplex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use simplex::{gradient, nelder_mead, newton_polish, Minimum, SimplexOptions};

use crate::market_data::ReturnSeries;
use crate::stats::{mean, sample_variance};
use crate::{Error, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_3;
/// Largest admissible persistence a + b.
const MAX_PERSISTENCE: f64 = 1.0 - 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GarchParams {
    pub c: f64,
    pub a: f64,
    pub b: f64,
}

impl GarchParams {
    pub fn new(c: f64, a: f64, b: f64) -> Result<Self> {
        let p = Self { c, a, b };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { c, a, b } = *self;
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::validation(format!(
                "variance intercept c={c} must be > 0"
            )));
        }
        if !(a.is_finite() && a >= 0.0 && b.is_finite() && b >= 0.0) {
            return Err(Error::validation(format!(
                "a={a}, b={b} must be non-negative"
            )));
        }
        if a + b >= 1.0 {
            return Err(Error::validation(format!(
                "a+b={} violates covariance stationarity",
                a + b
            )));
        }
        Ok(())
    }

    pub fn persistence(&self) -> f64 {
        self.a + self.b
    }

    pub fn unconditional_variance(&self) -> f64 {
        self.c / (1.0 - self.a - self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GarchMFit {
    pub mu: f64,
    /// Coefficient on σ²_t in the mean; 0 for a plain GARCH fit.
    pub lambda: f64,
    pub params: GarchParams,
    pub sigma2_path: Vec<f64>,
    /// ε_t = r_t − μ − λσ²_t
    pub residuals: Vec<f64>,
    pub loglik: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Best log-likelihood after each accepted optimizer step of the winning run.
    #[serde(skip)]
    pub loglik_trace: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialValues {
    pub mu: f64,
    pub lambda: f64,
    pub c: f64,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameterization {
    /// Unconstrained search through log/logistic maps.
    Transformed,
    /// Search directly over (μ, λ, c, a, b), clipping into the admissible set.
    RawClipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Iteration cap for each simplex run.
    pub max_iterations: usize,
    pub loglik_rel_tol: f64,
    pub simplex_tol: f64,
    /// `None` uses moment-based starting values.
    pub initial: Option<InitialValues>,
    /// Extra jittered starts beyond the moment-based one.
    pub restarts: usize,
    pub min_observations: usize,
    pub seed: u64,
    pub parameterization: Parameterization,
    /// Newton iterations after the simplex; 0 disables the polish.
    pub polish_iterations: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            loglik_rel_tol: 1e-8,
            simplex_tol: 1e-9,
            initial: None,
            restarts: 2,
            min_observations: 100,
            seed: 0,
            parameterization: Parameterization::Transformed,
            polish_iterations: 20,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.loglik_rel_tol > 0.0 && self.simplex_tol > 0.0) {
            return Err(Error::validation("tolerances must be > 0"));
        }
        if self.max_iterations == 0 {
            return Err(Error::validation("max_iterations must be > 0"));
        }
        Ok(())
    }
}

/// σ²_t path for given parameters, started at the sample variance of `r`.
pub fn conditional_variance_path(
    params: &GarchParams,
    mu: f64,
    lambda: f64,
    r: &[f64],
) -> Vec<f64> {
    let mut path = Vec::with_capacity(r.len());
    if r.is_empty() {
        return path;
    }
    let h0 = if r.len() > 1 {
        sample_variance(r)
    } else {
        params.c
    };
    let mut h = h0;
    let mut e_prev = 0.0;
    for (t, &x) in r.iter().enumerate() {
        if t > 0 {
            h = params.c + params.a * e_prev * e_prev + params.b * h;
        }
        path.push(h);
        e_prev = x - mu - lambda * h;
    }
    path
}

/// Gaussian log-likelihood with σ²_0 = `h0`. Returns −∞ on an inadmissible path.
fn loglik_with_start(r: &[f64], mu: f64, lambda: f64, c: f64, a: f64, b: f64, h0: f64) -> f64 {
    let mut h = h0;
    let mut e_prev = 0.0;
    let mut ll = 0.0;
    for (t, &x) in r.iter().enumerate() {
        if t > 0 {
            h = c + a * e_prev * e_prev + b * h;
        }
        if !(h > 0.0 && h.is_finite()) {
            return f64::NEG_INFINITY;
        }
        let e = x - mu - lambda * h;
        ll -= 0.5 * (LN_2PI + h.ln() + e * e / h);
        e_prev = e;
    }
    if ll.is_finite() {
        ll
    } else {
        f64::NEG_INFINITY
    }
}

/// Gaussian log-likelihood of `r` under (μ, λ, c, a, b).
pub fn log_likelihood(params: &GarchParams, mu: f64, lambda: f64, r: &[f64]) -> f64 {
    let h0 = sample_variance(r);
    loglik_with_start(r, mu, lambda, params.c, params.a, params.b, h0)
}

#[derive(Debug, Clone, Copy)]
struct Point {
    mu: f64,
    lambda: f64,
    c: f64,
    a: f64,
    b: f64,
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn logit(p: f64) -> f64 {
    let p = p.clamp(1e-12, 1.0 - 1e-12);
    (p / (1.0 - p)).ln()
}

/// Coordinates for the optimizer. Location and scale come from the sample so
/// that every coordinate is O(1) near the optimum.
struct Mapping {
    scheme: Parameterization,
    free_lambda: bool,
    sd: f64,
    var: f64,
}

impl Mapping {
    fn split<'a>(&self, theta: &'a [f64]) -> (f64, f64, &'a [f64]) {
        if self.free_lambda {
            (theta[0], theta[1], &theta[2..])
        } else {
            (theta[0], 0.0, &theta[1..])
        }
    }

    fn decode(&self, theta: &[f64]) -> Point {
        let (t_mean, t_lambda, rest) = self.split(theta);
        let lambda = t_lambda / self.sd;
        // t_mean is the total mean at the sample variance, in sd units
        let mu = self.sd * t_mean - lambda * self.var;
        match self.scheme {
            Parameterization::Transformed => {
                let p = logistic(rest[1]).min(MAX_PERSISTENCE);
                let w = logistic(rest[2]);
                Point {
                    mu,
                    lambda,
                    c: self.var * rest[0].exp(),
                    a: p * w,
                    b: p * (1.0 - w),
                }
            }
            Parameterization::RawClipped => {
                let c = (self.var * rest[0]).max(1e-10 * self.var);
                let mut a = rest[1].max(0.0);
                let mut b = rest[2].max(0.0);
                if a + b > MAX_PERSISTENCE {
                    let k = MAX_PERSISTENCE / (a + b);
                    a *= k;
                    b *= k;
                }
                Point {
                    mu,
                    lambda,
                    c,
                    a,
                    b,
                }
            }
        }
    }

    fn encode(&self, p: &Point) -> Vec<f64> {
        let lambda = if self.free_lambda { p.lambda } else { 0.0 };
        let t_mean = (p.mu + lambda * self.var) / self.sd;
        let mut theta = vec![t_mean];
        if self.free_lambda {
            theta.push(lambda * self.sd);
        }
        match self.scheme {
            Parameterization::Transformed => {
                let a = p.a.max(1e-8);
                let b = p.b.max(1e-8);
                theta.push((p.c / self.var).ln());
                theta.push(logit(a + b));
                theta.push(logit(a / (a + b)));
            }
            Parameterization::RawClipped => {
                theta.push(p.c / self.var);
                theta.push(p.a);
                theta.push(p.b);
            }
        }
        theta
    }

    fn initial_step(&self) -> Vec<f64> {
        let var_steps: [f64; 3] = match self.scheme {
            Parameterization::Transformed => [0.5, 0.5, 0.5],
            Parameterization::RawClipped => [0.05, 0.03, 0.05],
        };
        let mut s = vec![0.05];
        if self.free_lambda {
            s.push(0.1);
        }
        s.extend(var_steps);
        s
    }
}

fn validate_sample(r: &ReturnSeries, cfg: &FitConfig) -> Result<(f64, f64)> {
    cfg.validate()?;
    let x = r.values();
    if x.len() < cfg.min_observations.max(3) {
        return Err(Error::InsufficientData {
            what: "GARCH estimation",
            needed: cfg.min_observations.max(3),
            got: x.len(),
        });
    }
    let m = mean(x);
    let v = sample_variance(x);
    let scale = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if !(v > (1e-12 * scale).powi(2)) {
        return Err(Error::DegenerateInput("return series is constant".into()));
    }
    Ok((m, v))
}

fn moment_start(m: f64, v: f64, free_lambda: bool) -> Point {
    Point {
        mu: m,
        lambda: if free_lambda { m / v } else { 0.0 },
        c: 0.1 * v,
        a: 0.05,
        b: 0.85,
    }
}

struct Run {
    min: Minimum,
    point: Point,
}

fn optimize(
    r: &[f64],
    m: f64,
    v: f64,
    cfg: &FitConfig,
    free_lambda: bool,
    extra_start: Option<Point>,
) -> (Run, usize) {
    let map = Mapping {
        scheme: cfg.parameterization,
        free_lambda,
        sd: v.sqrt(),
        var: v,
    };
    let objective = |theta: &[f64]| -> f64 {
        let p = map.decode(theta);
        -loglik_with_start(r, p.mu, p.lambda, p.c, p.a, p.b, v)
    };
    let opts = SimplexOptions {
        max_iterations: cfg.max_iterations,
        f_rel_tol: cfg.loglik_rel_tol,
        x_tol: cfg.simplex_tol,
        initial_step: map.initial_step(),
    };

    let base = match cfg.initial {
        Some(iv) => Point {
            mu: iv.mu,
            lambda: if free_lambda { iv.lambda } else { 0.0 },
            c: iv.c,
            a: iv.a,
            b: iv.b,
        },
        None => moment_start(m, v, free_lambda),
    };
    let base_theta = map.encode(&base);
    let mut starts = vec![base_theta.clone()];
    if let Some(p) = extra_start {
        starts.push(map.encode(&p));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let steps = map.initial_step();
    for _ in 0..cfg.restarts {
        let jittered = base_theta
            .iter()
            .zip(&steps)
            .map(|(t, s)| t + s * rng.gen_range(-1.0..1.0))
            .collect();
        starts.push(jittered);
    }

    let mut total_iterations = 0;
    let mut best: Option<Minimum> = None;
    for start in &starts {
        let run = nelder_mead(objective, start, &opts);
        total_iterations += run.iterations;
        let better = best.as_ref().map_or(true, |b| {
            run.f < b.f || (run.f == b.f && run.converged && !b.converged)
        });
        if better {
            best = Some(run);
        }
    }
    let mut best = best.expect("at least one start");
    if cfg.polish_iterations > 0 {
        let before = best.iterations;
        best = newton_polish(objective, best, cfg.polish_iterations, 1e-14);
        total_iterations += best.iterations - before;
    }
    let point = map.decode(&best.x);
    (Run { min: best, point }, total_iterations)
}

fn finish(r: &[f64], run: Run, iterations: usize) -> Result<GarchMFit> {
    let Point {
        mu,
        lambda,
        c,
        a,
        b,
    } = run.point;
    let params = GarchParams { c, a, b };
    let sigma2_path = conditional_variance_path(&params, mu, lambda, r);
    let residuals = r
        .iter()
        .zip(&sigma2_path)
        .map(|(x, h)| x - mu - lambda * h)
        .collect();
    let fit = GarchMFit {
        mu,
        lambda,
        params,
        sigma2_path,
        residuals,
        loglik: -run.min.f,
        converged: run.min.converged && run.min.f.is_finite(),
        iterations,
        loglik_trace: run.min.history.iter().map(|f| -f).collect(),
    };
    if !fit.converged || params.validate().is_err() {
        return Err(Error::Fit {
            best_loglik: fit.loglik,
            iterations,
            best_params: Some(Box::new(fit)),
        });
    }
    Ok(fit)
}

/// Plain GARCH(1,1) with a constant mean (λ fixed at 0).
pub fn fit_garch(r: &ReturnSeries, cfg: &FitConfig) -> Result<GarchMFit> {
    let (m, v) = validate_sample(r, cfg)?;
    let (run, iterations) = optimize(r.values(), m, v, cfg, false, None);
    finish(r.values(), run, iterations)
}

/// GARCH(1,1)-M: jointly estimates (μ, λ, c, a, b).
pub fn fit_garch_m(r: &ReturnSeries, cfg: &FitConfig) -> Result<GarchMFit> {
    let (m, v) = validate_sample(r, cfg)?;
    let x = r.values();
    // the nested optimum is a start, even if that run itself did not converge
    let (nested, nested_iter) = optimize(x, m, v, cfg, false, None);
    let (run, iterations) = optimize(x, m, v, cfg, true, Some(nested.point));
    finish(x, run, iterations + nested_iter)
}

/// Plain GARCH and GARCH-M fits of the same sample, sharing the plain run. The
/// GARCH-M log-likelihood is never below the plain one when both converge.
pub fn fit_garch_pair(
    r: &ReturnSeries,
    cfg: &FitConfig,
) -> Result<(Result<GarchMFit>, Result<GarchMFit>)> {
    let (m, v) = validate_sample(r, cfg)?;
    let x = r.values();
    let (nested, nested_iter) = optimize(x, m, v, cfg, false, None);
    let start = nested.point;
    let (run, iterations) = optimize(x, m, v, cfg, true, Some(start));
    Ok((
        finish(x, nested, nested_iter),
        finish(x, run, iterations + nested_iter),
    ))
}

/// Central finite-difference gradient of the log-likelihood with respect to
/// (μ, λ, c, a, b), each component multiplied by the parameter's magnitude.
pub fn scaled_loglik_gradient(fit: &GarchMFit, r: &[f64]) -> [f64; 5] {
    let v = sample_variance(r);
    let theta = [fit.mu, fit.lambda, fit.params.c, fit.params.a, fit.params.b];
    let ll = |t: &[f64]| loglik_with_start(r, t[0], t[1], t[2], t[3], t[4], v);
    let mut out = [0.0; 5];
    for i in 0..5 {
        let mag = theta[i].abs();
        if mag == 0.0 {
            continue;
        }
        let h = 1e-5 * mag;
        let mut up = theta;
        let mut dn = theta;
        up[i] += h;
        dn[i] -= h;
        out[i] = (ll(&up) - ll(&dn)) / (2.0 * h) * mag;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        assert!(GarchParams::new(1e-5, 0.05, 0.9).is_ok());
        assert!(GarchParams::new(0.0, 0.05, 0.9).is_err());
        assert!(GarchParams::new(1e-5, -0.01, 0.9).is_err());
        assert!(GarchParams::new(1e-5, 0.2, 0.8).is_err());
    }

    #[test]
    fn variance_path_collapses_without_dynamics() {
        let p = GarchParams::new(0.3, 0.0, 0.0).unwrap();
        let r = [0.1, -0.4, 0.25, 0.9, -1.1];
        let path = conditional_variance_path(&p, 0.0, 0.2, &r);
        assert!((path[0] - sample_variance(&r)).abs() < 1e-15);
        assert!(path[1..].iter().all(|&h| h == 0.3));
    }

    #[test]
    fn mapping_round_trips() {
        for scheme in [Parameterization::Transformed, Parameterization::RawClipped] {
            let map = Mapping {
                scheme,
                free_lambda: true,
                sd: 0.02,
                var: 4e-4,
            };
            let p = Point {
                mu: 1e-3,
                lambda: 2.5,
                c: 1e-5,
                a: 0.07,
                b: 0.88,
            };
            let q = map.decode(&map.encode(&p));
            for (x, y) in [
                (p.mu, q.mu),
                (p.lambda, q.lambda),
                (p.c, q.c),
                (p.a, q.a),
                (p.b, q.b),
            ] {
                assert!((x - y).abs() <= 1e-12 * x.abs().max(1e-6), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn transformed_space_is_always_admissible() {
        let map = Mapping {
            scheme: Parameterization::Transformed,
            free_lambda: true,
            sd: 0.02,
            var: 4e-4,
        };
        for theta in [
            [0.0, 0.0, -40.0, 60.0, 60.0],
            [1.0, -3.0, 20.0, -60.0, -60.0],
        ] {
            let p = map.decode(&theta);
            assert!(p.c > 0.0 && p.a >= 0.0 && p.b >= 0.0 && p.a + p.b < 1.0);
        }
    }

    #[test]
    fn short_and_constant_samples_rejected() {
        let d0 = chrono::NaiveDate::from_ymd_opt(2000, 1, 3).unwrap();
        let dates: Vec<_> = (0..150).map(|i| d0 + chrono::Days::new(7 * i)).collect();
        let flat = ReturnSeries::new(
            crate::market_data::Frequency::Weekly,
            dates.clone(),
            vec![0.01; 150],
        )
        .unwrap();
        assert!(matches!(
            fit_garch_m(&flat, &FitConfig::default()),
            Err(Error::DegenerateInput(_))
        ));
        let short = flat.slice(0..50);
        assert!(matches!(
            fit_garch(&short, &FitConfig::default()),
            Err(Error::InsufficientData { .. })
        ));
    }
}

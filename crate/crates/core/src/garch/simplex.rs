//! Derivative-free minimization: Nelder–Mead simplex plus a damped Newton
//! polish on finite-difference derivatives.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    /// Stop when (f_worst − f_best) ≤ f_rel_tol · |f_best|.
    pub f_rel_tol: f64,
    /// Stop when every vertex is within `x_tol` (∞-norm) of the best one.
    pub x_tol: f64,
    pub initial_step: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Best objective value after each iteration.
    pub history: Vec<f64>,
}

fn eval<F: FnMut(&[f64]) -> f64>(f: &mut F, x: &[f64]) -> f64 {
    let v = f(x);
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: &SimplexOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = eval(&mut f, x0);
    simplex.push((x0.to_vec(), f0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step[i];
        let fx = eval(&mut f, &x);
        simplex.push((x, fx));
    }

    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        if best.is_finite() {
            let f_spread = worst - best;
            let x_spread = simplex[1..]
                .iter()
                .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0f64, f64::max);
            if f_spread <= opts.f_rel_tol * best.abs() || x_spread < opts.x_tol {
                converged = true;
                break;
            }
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(1.0);
        let fr = eval(&mut f, &xr);
        if fr < simplex[0].1 {
            let xe = along(2.0);
            let fe = eval(&mut f, &xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = along(0.5);
                let fc = eval(&mut f, &xc);
                (xc, fc)
            } else {
                let xc = along(-0.5);
                let fc = eval(&mut f, &xc);
                (xc, fc)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let x_best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    let xs: Vec<f64> = x_best
                        .iter()
                        .zip(&v.0)
                        .map(|(b, x)| b + 0.5 * (x - b))
                        .collect();
                    let fs = eval(&mut f, &xs);
                    *v = (xs, fs);
                }
            }
        }
        let current_best = simplex.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        history.push(current_best);
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex.swap_remove(0);
    Minimum {
        x,
        f: fx,
        iterations,
        converged,
        history,
    }
}

pub fn gradient<F: FnMut(&[f64]) -> f64>(f: &mut F, x: &[f64], h: f64) -> Vec<f64> {
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|i| {
            xp[i] = x[i] + h;
            let fp = eval(f, &xp);
            xp[i] = x[i] - h;
            let fm = eval(f, &xp);
            xp[i] = x[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

fn hessian<F: FnMut(&[f64]) -> f64>(f: &mut F, x: &[f64], fx: f64, h: f64) -> DMatrix<f64> {
    let n = x.len();
    let mut hm = DMatrix::zeros(n, n);
    let mut xp = x.to_vec();
    for i in 0..n {
        xp[i] = x[i] + h;
        let fp = eval(f, &xp);
        xp[i] = x[i] - h;
        let fm = eval(f, &xp);
        xp[i] = x[i];
        hm[(i, i)] = (fp - 2.0 * fx + fm) / (h * h);
        for j in 0..i {
            let mut corner = |si: f64, sj: f64| {
                xp[i] = x[i] + si * h;
                xp[j] = x[j] + sj * h;
                let v = eval(f, &xp);
                xp[i] = x[i];
                xp[j] = x[j];
                v
            };
            let v = (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0) + corner(-1.0, -1.0))
                / (4.0 * h * h);
            hm[(i, j)] = v;
            hm[(j, i)] = v;
        }
    }
    hm
}

/// Levenberg-damped Newton iterations from `start`. Only steps that lower the
/// objective are accepted, so the returned value never exceeds `start.f`.
pub fn newton_polish<F>(mut f: F, start: Minimum, max_iterations: usize, f_rel_tol: f64) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let Minimum {
        mut x,
        f: mut fx,
        mut iterations,
        converged,
        mut history,
    } = start;
    if !fx.is_finite() {
        return Minimum {
            x,
            f: fx,
            iterations,
            converged,
            history,
        };
    }
    let n = x.len();
    let mut damping = 0.0f64;
    for _ in 0..max_iterations {
        let g = DVector::from_vec(gradient(&mut f, &x, 1e-5));
        let h = hessian(&mut f, &x, fx, 1e-3);
        if !g.iter().chain(h.iter()).all(|v| v.is_finite()) {
            break;
        }
        let scale = (0..n).map(|i| h[(i, i)].abs()).fold(1e-12, f64::max);
        let mut accepted = false;
        for _ in 0..12 {
            let mut m = h.clone();
            for i in 0..n {
                m[(i, i)] += damping * scale;
            }
            let Some(chol) = m.cholesky() else {
                damping = if damping == 0.0 { 1e-6 } else { damping * 10.0 };
                continue;
            };
            let step = chol.solve(&(-&g));
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a + d).collect();
            let ft = eval(&mut f, &trial);
            if ft < fx {
                let gain = fx - ft;
                x = trial;
                fx = ft;
                damping /= 10.0;
                accepted = true;
                iterations += 1;
                history.push(fx);
                if gain <= f_rel_tol * fx.abs() {
                    return Minimum {
                        x,
                        f: fx,
                        iterations,
                        converged,
                        history,
                    };
                }
                break;
            }
            damping = if damping == 0.0 { 1e-6 } else { damping * 10.0 };
        }
        if !accepted {
            break;
        }
    }
    Minimum {
        x,
        f: fx,
        iterations,
        converged,
        history,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn finds_rosenbrock_minimum() {
        let opts = SimplexOptions {
            max_iterations: 5000,
            f_rel_tol: 1e-14,
            x_tol: 1e-10,
            initial_step: vec![0.5, 0.5],
        };
        let m = nelder_mead(rosenbrock, &[-1.2, 1.0], &opts);
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-4, "{:?}", m.x);
        assert!((m.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn history_never_increases() {
        let opts = SimplexOptions {
            max_iterations: 500,
            f_rel_tol: 1e-12,
            x_tol: 1e-12,
            initial_step: vec![0.3, 0.3, 0.3],
        };
        let quad = |x: &[f64]| {
            x.iter()
                .enumerate()
                .map(|(i, v)| (i + 1) as f64 * v * v)
                .sum()
        };
        let m = nelder_mead(quad, &[1.0, -2.0, 0.5], &opts);
        assert!(m.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn polish_reaches_quadratic_minimum() {
        let quad =
            |x: &[f64]| 3.0 * (x[0] - 1.0).powi(2) + (x[1] + 2.0).powi(2) + 0.5 * x[0] * x[1];
        let start = Minimum {
            x: vec![0.0, 0.0],
            f: quad(&[0.0, 0.0]),
            iterations: 0,
            converged: true,
            history: vec![],
        };
        let m = newton_polish(quad, start, 10, 1e-15);
        let g = gradient(&mut |x: &[f64]| quad(x), &m.x, 1e-6);
        assert!(g.iter().all(|v| v.abs() < 1e-6), "{g:?}");
    }
}

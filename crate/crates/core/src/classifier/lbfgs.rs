//! Limited-memory BFGS minimizer with a backtracking Armijo line search.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy)]
pub struct LbfgsOptions {
    pub history: usize,
    pub max_iter: usize,
    /// Stop when the relative change of the objective or the gradient
    /// max-norm falls below this.
    pub tol: f64,
    pub armijo: f64,
    pub backtrack: f64,
    pub max_line_search: usize,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self {
            history: 10,
            max_iter: 200,
            tol: 1e-6,
            armijo: 1e-4,
            backtrack: 0.5,
            max_line_search: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    RelativeChange,
    GradientNorm,
    MaxIterations,
    LineSearchFailed,
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// Objective after each accepted step, starting with the initial value.
    pub trace: Vec<f64>,
    pub termination: Termination,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonFinite {
    pub iteration: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Minimizes `f`, which returns the value and writes the gradient.
pub fn minimize<F>(mut f: F, x0: Vec<f64>, opts: LbfgsOptions) -> Result<Minimum, NonFinite>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let n = x0.len();
    let mut x = x0;
    let mut g = vec![0.0; n];
    let mut fx = f(&x, &mut g);
    if !fx.is_finite() {
        return Err(NonFinite { iteration: 0 });
    }
    let mut trace = vec![fx];
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut termination = Termination::MaxIterations;
    let mut iterations = 0;
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];

    if max_norm(&g) < opts.tol {
        return Ok(Minimum {
            x,
            value: fx,
            iterations,
            trace,
            termination: Termination::GradientNorm,
        });
    }

    while iterations < opts.max_iter {
        // two-loop recursion: d = -H g
        let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &d);
            for (di, yi) in d.iter_mut().zip(y) {
                *di -= a * yi;
            }
            alphas.push(a);
        }
        if let Some((s, y, _)) = history.back() {
            let gamma = dot(s, y) / dot(y, y);
            d.iter_mut().for_each(|v| *v *= gamma);
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &d);
            for (di, si) in d.iter_mut().zip(s) {
                *di += (a - b) * si;
            }
        }
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            history.clear();
            d = g.iter().map(|v| -v).collect();
            slope = dot(&g, &d);
        }

        let mut step = if history.is_empty() {
            1.0 / max_norm(&g).max(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..opts.max_line_search {
            for i in 0..n {
                x_new[i] = x[i] + step * d[i];
            }
            let f_try = f(&x_new, &mut g_new);
            if f_try.is_finite() && f_try <= fx + opts.armijo * step * slope {
                accepted = Some(f_try);
                break;
            }
            step *= opts.backtrack;
        }
        let Some(f_next) = accepted else {
            termination = Termination::LineSearchFailed;
            break;
        };
        iterations += 1;

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 {
            if history.len() == opts.history {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        let change = (fx - f_next).abs() / fx.abs().max(f_next.abs()).max(1.0);
        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut g, &mut g_new);
        fx = f_next;
        trace.push(fx);
        if max_norm(&g) < opts.tol {
            termination = Termination::GradientNorm;
            break;
        }
        if change < opts.tol {
            termination = Termination::RelativeChange;
            break;
        }
    }
    Ok(Minimum {
        x,
        value: fx,
        iterations,
        trace,
        termination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64], g: &mut [f64]| {
            let (a, b) = (x[0], x[1]);
            g[0] = -2.0 * (1.0 - a) - 400.0 * a * (b - a * a);
            g[1] = 200.0 * (b - a * a);
            (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2)
        };
        let opts = LbfgsOptions {
            max_iter: 500,
            tol: 1e-12,
            ..Default::default()
        };
        let m = minimize(f, vec![-1.2, 1.0], opts).unwrap();
        assert!((m.x[0] - 1.0).abs() < 1e-4 && (m.x[1] - 1.0).abs() < 1e-4, "{:?}", m.x);
        assert!(m.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn quadratic_converges_fast() {
        let f = |x: &[f64], g: &mut [f64]| {
            let mut v = 0.0;
            for i in 0..x.len() {
                let c = (i + 1) as f64;
                g[i] = 2.0 * c * (x[i] - 1.0);
                v += c * (x[i] - 1.0).powi(2);
            }
            v
        };
        let m = minimize(f, vec![0.0; 8], LbfgsOptions::default()).unwrap();
        assert!(m.x.iter().all(|v| (v - 1.0).abs() < 1e-3));
        assert!(m.iterations < 60);
    }

    #[test]
    fn non_finite_is_reported() {
        let f = |_: &[f64], _: &mut [f64]| f64::NAN;
        assert_eq!(minimize(f, vec![0.0], LbfgsOptions::default()).unwrap_err(), NonFinite { iteration: 0 });
    }
}

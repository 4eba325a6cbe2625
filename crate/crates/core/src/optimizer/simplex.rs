use std::cell::Cell;

use crate::circular::wrap_angle;
use crate::error::{FmmError, Result};
use crate::optimizer::grid::OMEGA_FLOOR;

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexConfig {
    pub max_evals: usize,
    /// Stop once `(f_worst − f_best) ≤ rel_tol · (|f_best| + |f_worst|) / 2`.
    pub rel_tol: f64,
    pub initial_step: Vec<f64>,
}

impl SimplexConfig {
    pub fn new(max_evals: usize, rel_tol: f64, initial_step: Vec<f64>) -> Result<Self> {
        if max_evals == 0 {
            return Err(FmmError::config("max_evals must be positive"));
        }
        if !(rel_tol > 0.0) {
            return Err(FmmError::config("rel_tol must be positive"));
        }
        if initial_step.is_empty() || initial_step.iter().any(|s| !(*s > 0.0)) {
            return Err(FmmError::config("initial steps must be positive"));
        }
        Ok(SimplexConfig {
            max_evals,
            rel_tol,
            initial_step,
        })
    }

    /// 200 evaluations, `rel_tol = 1e-8`, with the given per-dimension steps.
    pub fn with_steps(initial_step: Vec<f64>) -> Self {
        SimplexConfig {
            max_evals: 200,
            rel_tol: 1e-8,
            initial_step,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    /// `false` when the evaluation budget ran out first.
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Nelder–Mead downhill simplex on an unconstrained objective.
///
/// The start point is a vertex of the initial simplex, so the returned value
/// never exceeds `objective(start)`. Non-finite objective values are treated
/// as `+∞`.
pub fn simplex_minimize<F>(objective: F, start: &[f64], cfg: &SimplexConfig) -> SimplexResult
where
    F: Fn(&[f64]) -> f64,
{
    let n = start.len();
    assert_eq!(cfg.initial_step.len(), n, "one initial step per dimension");
    let evals = Cell::new(0usize);
    let f = |x: &[f64]| {
        evals.set(evals.get() + 1);
        let v = objective(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = f(start);
    simplex.push((start.to_vec(), f0));
    for d in 0..n {
        let mut x = start.to_vec();
        x[d] += cfg.initial_step[d];
        let fx = f(&x);
        simplex.push((x, fx));
    }

    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[n].1);
        if best.is_finite() && worst - best <= cfg.rel_tol * 0.5 * (best.abs() + worst.abs()) {
            converged = true;
            break;
        }
        if evals.get() >= cfg.max_evals {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|d| simplex[..n].iter().map(|v| v.0[d]).sum::<f64>() / n as f64)
            .collect();
        let along = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let xr = along(REFLECT);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = along(EXPAND);
            let fe = f(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let xc = along(CONTRACT * REFLECT);
            let fc = f(&xc);
            (xc, fc)
        } else {
            let xc = along(-CONTRACT);
            let fc = f(&xc);
            (xc, fc)
        };
        if fc < simplex[n].1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let x0 = simplex[0].0.clone();
        for v in simplex.iter_mut().skip(1) {
            for d in 0..n {
                v.0[d] = x0[d] + SHRINK * (v.0[d] - x0[d]);
            }
            v.1 = f(&v.0);
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (point, value) = simplex.swap_remove(0);
    SimplexResult {
        point,
        value,
        evals: evals.get(),
        converged,
    }
}

/// Outcome of the bounded (α, ω) simplex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaOmegaMin {
    pub alpha: f64,
    pub omega: f64,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Nelder–Mead over `(α, ω)`.
///
/// The objective must be 2π-periodic in α: α is free during the search and
/// wrapped to `[0, 2π)` on return. ω is projected onto
/// `[OMEGA_FLOOR, 1]` before every evaluation, so a minimum beyond the
/// boundary is reported at the boundary.
pub fn nelder_mead<F>(objective: F, start: (f64, f64), cfg: &SimplexConfig) -> AlphaOmegaMin
where
    F: Fn(f64, f64) -> f64,
{
    let clamp = |w: f64| w.clamp(OMEGA_FLOOR, 1.0);
    let start = (start.0, clamp(start.1));
    let f_start = objective(start.0, start.1);
    let res = simplex_minimize(|x| objective(x[0], clamp(x[1])), &[start.0, start.1], cfg);
    let (alpha, omega) = (wrap_angle(res.point[0]), clamp(res.point[1]));
    let value = objective(alpha, omega);
    if !(value <= f_start) {
        return AlphaOmegaMin {
            alpha: wrap_angle(start.0),
            omega: start.1,
            value: f_start,
            evals: res.evals + 2,
            converged: res.converged,
        };
    }
    AlphaOmegaMin {
        alpha,
        omega,
        value,
        evals: res.evals + 2,
        converged: res.converged,
    }
}

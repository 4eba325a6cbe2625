use std::f64::consts::TAU;

use crate::circular::wrap_angle;
use crate::error::{FmmError, Result};
use crate::estimation::{assemble, check_data, FitConfig, FitDiagnostics, FitResult, StopReason};
use crate::io::TimeSeries;
use crate::optimizer::grid::{cell_order, GridPoint};
use crate::optimizer::linear::{fit_at, profile_rss};
use crate::optimizer::{
    grid_minimize, nelder_mead, recover_wave, simplex_minimize, GridSpec, SimplexConfig,
    OMEGA_FLOOR,
};
use crate::signal::{FmmModel, WaveParams};

/// Smallest initial simplex step; refined grids can get narrower than this.
const MIN_SIMPLEX_STEP: f64 = 1e-6;

/// Grid settings for one single-wave search.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SearchSettings {
    pub alpha_count: usize,
    pub omega_count: usize,
    pub num_reps: usize,
    pub parallel: bool,
}

impl From<&FitConfig> for SearchSettings {
    fn from(c: &FitConfig) -> Self {
        SearchSettings {
            alpha_count: c.length_alpha_grid,
            omega_count: c.length_omega_grid,
            num_reps: c.num_reps,
            parallel: c.parallelize,
        }
    }
}

/// One wave fitted to a signal, intercept included.
#[derive(Debug, Clone)]
pub(crate) struct WaveFit {
    pub intercept: f64,
    pub wave: WaveParams,
    pub grid_evaluations: u64,
}

impl WaveFit {
    /// `intercept + wave(t)` at every time point.
    pub fn fitted(&self, t: &[f64]) -> Vec<f64> {
        t.iter()
            .map(|&ti| self.intercept + self.wave.value(ti))
            .collect()
    }
}

/// Grid search, refinement rounds and a final simplex polish over (α, ω).
///
/// With `omega_fixed` only α is searched. `warm` is a candidate (α, ω) that
/// competes with the grid winner before the simplex; passing the previous
/// estimate makes the returned RSS no worse than that estimate's.
pub(crate) fn fit_wave(
    t: &[f64],
    x: &[f64],
    settings: SearchSettings,
    omega_fixed: Option<f64>,
    warm: Option<(f64, f64)>,
) -> Result<WaveFit> {
    let objective = |alpha: f64, omega: f64| profile_rss(t, x, alpha, omega);

    let mut spec = match omega_fixed {
        Some(w) => GridSpec::alpha_only(settings.alpha_count, (0.0, TAU), w),
        None => GridSpec::full(settings.alpha_count, settings.omega_count)?,
    };
    let mut evals = spec.len() as u64;
    let mut best = grid_minimize(objective, &spec, settings.parallel);
    for _ in 1..settings.num_reps {
        spec = spec.refined_around(best.alpha, best.omega);
        evals += spec.len() as u64;
        let cand = grid_minimize(objective, &spec, settings.parallel);
        if cell_order(&cand, &best).is_lt() {
            best = cand;
        }
    }
    if let Some((alpha, omega)) = warm {
        let omega = omega_fixed.unwrap_or(omega);
        let cand = GridPoint {
            alpha: wrap_angle(alpha),
            omega,
            value: objective(wrap_angle(alpha), omega),
        };
        if cand.value < best.value {
            best = cand;
        }
    }
    if !best.value.is_finite() {
        return Err(FmmError::FitFailed(
            "design is degenerate at every grid point".into(),
        ));
    }

    let alpha_step = spec.alpha_step().max(MIN_SIMPLEX_STEP);
    let (alpha, omega) = match omega_fixed {
        Some(w) => {
            let cfg = SimplexConfig::with_steps(vec![alpha_step]);
            let res = simplex_minimize(|p| objective(p[0], w), &[best.alpha], &cfg);
            let alpha = wrap_angle(res.point[0]);
            if objective(alpha, w) <= best.value {
                (alpha, w)
            } else {
                (wrap_angle(best.alpha), w)
            }
        }
        None => {
            let cfg = SimplexConfig::with_steps(vec![
                alpha_step,
                spec.omega_step().max(MIN_SIMPLEX_STEP),
            ]);
            let res = nelder_mead(objective, (best.alpha, best.omega), &cfg);
            (res.alpha, res.omega)
        }
    };

    let lin = fit_at(t, x, alpha, omega)?;
    let (intercept, amplitude, beta) = recover_wave(lin.intercept, lin.delta, lin.gamma, alpha);
    Ok(WaveFit {
        intercept,
        wave: WaveParams::new(amplitude, alpha, beta, omega)?,
        grid_evaluations: evals,
    })
}

/// Single-wave fit: grid search over (α, ω), `num_reps − 1` refinement
/// rounds, then Nelder–Mead. `omega_fixed` pins ω and searches α only.
pub fn fit_mono(data: &TimeSeries, cfg: &FitConfig, omega_fixed: Option<f64>) -> Result<FitResult> {
    let mut single = cfg.clone();
    single.nback = 1;
    single.beta_blocks = vec![1];
    single.omega_blocks = vec![1];
    single.validate()?;
    check_data(data, 1)?;
    if let Some(w) = omega_fixed {
        if !(OMEGA_FLOOR..=1.0).contains(&w) {
            return Err(FmmError::config(format!(
                "fixed omega must lie in [{OMEGA_FLOOR}, 1], got {w}"
            )));
        }
    }
    let fit = fit_wave(
        data.time_points(),
        data.values(),
        SearchSettings::from(&single),
        omega_fixed,
        None,
    )?;
    let model = FmmModel::new(fit.intercept, vec![fit.wave])?;
    let diagnostics = FitDiagnostics {
        stop_reason: StopReason::SingleWave,
        grid_evaluations: fit.grid_evaluations,
        r2_history: Vec::new(),
        pre_finish_sse: None,
    };
    assemble(data, model, 1, diagnostics)
}

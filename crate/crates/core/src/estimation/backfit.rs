use crate::circular::angular_mean;
use crate::error::{FmmError, Result};
use crate::estimation::mono::{fit_wave, SearchSettings, WaveFit};
use crate::estimation::{
    assemble, blocks_of, check_data, r_squared, FitConfig, FitDiagnostics, FitResult, StopReason,
    StopRule,
};
use crate::io::TimeSeries;
use crate::optimizer::nonneg_joint_ls;
use crate::signal::{FmmModel, WaveParams};

/// Current estimate of each wave; `None` until first fitted.
pub(crate) type Components = Vec<Option<(WaveFit, Vec<f64>)>>;

/// Sum of the fitted contributions (intercepts included) of every component except `skip`.
pub(crate) fn others_sum(comps: &Components, n: usize, skip: &[usize]) -> Vec<f64> {
    let mut acc = vec![0.0; n];
    for (j, c) in comps.iter().enumerate() {
        if skip.contains(&j) {
            continue;
        }
        if let Some((_, fitted)) = c {
            for (a, f) in acc.iter_mut().zip(fitted) {
                *a += f;
            }
        }
    }
    acc
}

/// Outcome of a backfitting loop, before the joint amplitude fit.
pub(crate) struct Backfitted {
    pub waves: Vec<WaveParams>,
    pub intercepts: Vec<f64>,
    pub n_iter: usize,
    pub stop_reason: StopReason,
    pub r2_history: Vec<f64>,
    pub grid_evaluations: u64,
}

impl Backfitted {
    pub(crate) fn from_components(
        comps: Components,
        n_iter: usize,
        stop_reason: StopReason,
        r2_history: Vec<f64>,
        grid_evaluations: u64,
    ) -> Result<Self> {
        let mut waves = Vec::with_capacity(comps.len());
        let mut intercepts = Vec::with_capacity(comps.len());
        for c in comps {
            let (fit, _) =
                c.ok_or_else(|| FmmError::FitFailed("a wave was never fitted".into()))?;
            waves.push(fit.wave);
            intercepts.push(fit.intercept);
        }
        Ok(Backfitted {
            waves,
            intercepts,
            n_iter,
            stop_reason,
            r2_history,
            grid_evaluations,
        })
    }
}

/// Checks the stop rule after pass `k` (1-based) given the R² history.
pub(crate) fn should_stop(rule: StopRule, history: &[f64]) -> bool {
    match rule {
        StopRule::AlwaysFalse => false,
        StopRule::R2Delta(dif_max) => match history {
            [.., prev, last] => last - prev <= dif_max,
            _ => false,
        },
    }
}

/// Plain backfitting: each pass refits every wave against the partial
/// residual of the others, using already-updated waves for `I < J` and the
/// previous pass for `I > J`.
pub(crate) fn backfit(data: &TimeSeries, cfg: &FitConfig) -> Result<Backfitted> {
    let t = data.time_points();
    let x = data.values();
    let n = x.len();
    let settings = SearchSettings::from(cfg);
    let mut comps: Components = vec![None; cfg.nback];
    let mut history = Vec::with_capacity(cfg.maxiter);
    let mut evals = 0u64;
    let mut stop_reason = StopReason::MaxIterations;

    for _pass in 0..cfg.maxiter {
        for j in 0..cfg.nback {
            let others = others_sum(&comps, n, &[j]);
            let partial: Vec<f64> = x.iter().zip(&others).map(|(a, b)| a - b).collect();
            let warm = comps[j].as_ref().map(|(f, _)| (f.wave.alpha, f.wave.omega));
            let fit = fit_wave(t, &partial, settings, None, warm)?;
            evals += fit.grid_evaluations;
            let fitted = fit.fitted(t);
            comps[j] = Some((fit, fitted));
        }
        let total = others_sum(&comps, n, &[]);
        history.push(r_squared(x, &total)?);
        if should_stop(cfg.stop_rule, &history) {
            stop_reason = StopReason::StopRule;
            break;
        }
    }
    let n_iter = history.len();
    Backfitted::from_components(comps, n_iter, stop_reason, history, evals)
}

/// Replaces every β in a multi-wave block by the block's angular mean.
pub(crate) fn restrict_betas(waves: &mut [WaveParams], labels: &[u32]) -> Result<()> {
    for block in blocks_of(labels) {
        if block.len() < 2 {
            continue;
        }
        let betas: Vec<f64> = block.iter().map(|&j| waves[j].beta).collect();
        let mean = angular_mean(&betas).map_err(|e| {
            FmmError::FitFailed(format!("cannot average β within a restriction block: {e}"))
        })?;
        for &j in &block {
            waves[j].beta = mean;
        }
    }
    Ok(())
}

/// Joint intercept/amplitude fit over fixed phases, then result assembly.
pub(crate) fn finish(data: &TimeSeries, fitted: Backfitted) -> Result<FitResult> {
    let t = data.time_points();
    let x = data.values();
    let unit: Vec<Vec<f64>> = fitted
        .waves
        .iter()
        .map(|w| {
            let u = WaveParams {
                amplitude: 1.0,
                ..*w
            };
            t.iter().map(|&ti| u.value(ti)).collect()
        })
        .collect();

    let pre_intercept: f64 = fitted.intercepts.iter().sum();
    let pre_sse: f64 = (0..x.len())
        .map(|i| {
            let f = pre_intercept
                + fitted
                    .waves
                    .iter()
                    .zip(&unit)
                    .map(|(w, u)| w.amplitude * u[i])
                    .sum::<f64>();
            (x[i] - f).powi(2)
        })
        .sum();

    let joint = nonneg_joint_ls(x, &unit)?;
    let waves = fitted
        .waves
        .iter()
        .zip(&joint.amplitudes)
        .map(|(w, &a)| WaveParams { amplitude: a, ..*w })
        .collect();
    let model = FmmModel::new(joint.intercept, waves)?;
    let diagnostics = FitDiagnostics {
        stop_reason: fitted.stop_reason,
        grid_evaluations: fitted.grid_evaluations,
        r2_history: fitted.r2_history,
        pre_finish_sse: Some(pre_sse),
    };
    assemble(data, model, fitted.n_iter, diagnostics)
}

/// Multicomponent fit by backfitting, finished with a joint nonnegative
/// amplitude fit. β restrictions in `cfg` are applied before the joint fit;
/// ω restrictions are ignored here (see [`fit_restricted`](crate::estimation::fit_restricted)).
pub fn fit_multi(data: &TimeSeries, cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    check_data(data, cfg.nback)?;
    let mut fitted = backfit(data, cfg)?;
    if cfg.has_beta_restrictions() {
        restrict_betas(&mut fitted.waves, &cfg.beta_blocks)?;
    }
    finish(data, fitted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::fit_mono;
    use crate::io::series::equally_spaced_times;

    #[test]
    fn stop_rule_needs_two_passes() {
        assert!(!should_stop(StopRule::R2Delta(0.1), &[0.5]));
        assert!(should_stop(StopRule::R2Delta(0.1), &[0.5, 0.55]));
        assert!(!should_stop(StopRule::R2Delta(0.01), &[0.5, 0.55]));
        assert!(!should_stop(StopRule::AlwaysFalse, &[0.5, 0.5]));
    }

    #[test]
    fn restrict_betas_equalises_blocks() {
        let mut w = vec![
            WaveParams::new(1.0, 0.0, 0.1, 0.5).unwrap(),
            WaveParams::new(1.0, 0.0, 6.2, 0.5).unwrap(),
            WaveParams::new(1.0, 0.0, 3.0, 0.5).unwrap(),
        ];
        restrict_betas(&mut w, &[1, 1, 2]).unwrap();
        assert_eq!(w[0].beta, w[1].beta);
        assert_eq!(w[2].beta, 3.0);
        assert!(
            crate::circular::circular_distance(
                w[0].beta,
                (0.1 + 6.2 - std::f64::consts::TAU) / 2.0
            ) < 1e-12
        );
    }

    #[test]
    fn single_wave_backfit_matches_mono() {
        let t = equally_spaced_times(60);
        let x: Vec<f64> = t
            .iter()
            .map(|&ti| 2.0 + (1.5 * (ti * 0.5).sin().powi(3)) + 0.05 * (ti * 13.0).cos())
            .collect();
        let data = TimeSeries::new(t, x).unwrap();
        let cfg = FitConfig::new(1);
        let multi = fit_multi(&data, &cfg).unwrap();
        let mono = fit_mono(&data, &cfg, None).unwrap();
        let (a, b) = (multi.model.waves[0], mono.model.waves[0]);
        assert_eq!(a.alpha, b.alpha);
        assert_eq!(a.omega, b.omega);
        assert_eq!(a.beta, b.beta);
        assert!((a.amplitude - b.amplitude).abs() < 1e-9);
        assert!((multi.model.intercept - mono.model.intercept).abs() < 1e-9);
    }
}

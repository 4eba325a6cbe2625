use rayon::prelude::*;

use crate::error::{FmmError, Result};
use crate::estimation::backfit::{
    finish, others_sum, restrict_betas, should_stop, Backfitted, Components,
};
use crate::estimation::mono::{fit_wave, SearchSettings};
use crate::estimation::{
    blocks_of, check_data, fit_multi, r_squared, FitConfig, FitResult, StopReason,
};
use crate::io::TimeSeries;
use crate::optimizer::{simplex_minimize, SimplexConfig, OMEGA_FLOOR};

/// Smallest initial simplex step on the shared ω.
const MIN_OMEGA_STEP: f64 = 1e-6;

/// Candidate state for one ω-block: the block's refitted components and the
/// total RSS of the whole model they produce.
struct BlockTrial {
    omega: f64,
    rss: f64,
    fits: Components,
    evals: u64,
}

/// Fits every wave of `block` in turn with ω pinned to `omega`, each against
/// the partial residual of all other waves.
fn trial(
    t: &[f64],
    x: &[f64],
    comps: &Components,
    block: &[usize],
    omega: f64,
    settings: SearchSettings,
) -> BlockTrial {
    let n = x.len();
    let mut local = comps.clone();
    let mut evals = 0;
    for &j in block {
        let others = others_sum(&local, n, &[j]);
        let partial: Vec<f64> = x.iter().zip(&others).map(|(a, b)| a - b).collect();
        let warm = local[j].as_ref().map(|(f, _)| (f.wave.alpha, omega));
        match fit_wave(t, &partial, settings, Some(omega), warm) {
            Ok(fit) => {
                evals += fit.grid_evaluations;
                let fitted = fit.fitted(t);
                local[j] = Some((fit, fitted));
            }
            Err(_) => {
                return BlockTrial {
                    omega,
                    rss: f64::INFINITY,
                    fits: local,
                    evals,
                };
            }
        }
    }
    let total = others_sum(&local, n, &[]);
    let rss = x.iter().zip(&total).map(|(a, b)| (a - b).powi(2)).sum();
    BlockTrial {
        omega,
        rss,
        fits: local,
        evals,
    }
}

fn better(a: &BlockTrial, b: &BlockTrial) -> bool {
    let key = |v: f64| if v.is_nan() { f64::INFINITY } else { v };
    key(a.rss)
        .total_cmp(&key(b.rss))
        .then(a.omega.total_cmp(&b.omega))
        .is_lt()
}

/// `count` equally spaced values over the closed `[lo, hi]`.
fn omega_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let step = (hi - lo) / (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else {
                lo + i as f64 * step
            }
        })
        .collect()
}

/// Searches the shared ω of one block: grid, refinement rounds, 1-D simplex.
/// The incumbent state competes as well, so the block's RSS never increases.
fn search_shared_omega(
    t: &[f64],
    x: &[f64],
    comps: &Components,
    block: &[usize],
    cfg: &FitConfig,
) -> BlockTrial {
    let settings = SearchSettings::from(cfg);
    let run = |omegas: &[f64]| -> Vec<BlockTrial> {
        if cfg.parallelize {
            omegas
                .par_iter()
                .map(|&w| trial(t, x, comps, block, w, settings))
                .collect()
        } else {
            omegas
                .iter()
                .map(|&w| trial(t, x, comps, block, w, settings))
                .collect()
        }
    };
    let mut evals = 0u64;
    let mut pick = |cands: Vec<BlockTrial>, best: Option<BlockTrial>| -> Option<BlockTrial> {
        let mut best = best;
        for c in cands {
            evals += c.evals;
            if best.as_ref().is_none_or(|b| better(&c, b)) {
                best = Some(c);
            }
        }
        best
    };

    let count = cfg.length_omega_grid;
    let (mut lo, mut hi) = (OMEGA_FLOOR, 1.0);
    let mut step = (hi - lo) / (count - 1) as f64;
    let mut best = pick(run(&omega_grid(lo, hi, count)), None);
    for _ in 1..cfg.num_reps {
        let centre = best.as_ref().map_or(lo, |b| b.omega);
        lo = (centre - step).max(OMEGA_FLOOR);
        hi = (centre + step).min(1.0);
        step = (hi - lo) / (count - 1) as f64;
        best = pick(run(&omega_grid(lo, hi, count)), best);
    }
    if let Some(w) = block_omega(comps, block) {
        best = pick(run(&[w]), best);
    }
    let start = best.as_ref().map_or(OMEGA_FLOOR, |b| b.omega);

    let simplex_cfg = SimplexConfig::with_steps(vec![step.max(MIN_OMEGA_STEP)]);
    let project = |w: f64| w.clamp(OMEGA_FLOOR, 1.0);
    let res = simplex_minimize(
        |p| trial(t, x, comps, block, project(p[0]), settings).rss,
        &[start],
        &simplex_cfg,
    );
    let polished = trial(t, x, comps, block, project(res.point[0]), settings);
    let best = pick(vec![polished], best).expect("at least one candidate");
    BlockTrial { evals, ..best }
}

/// Shared ω of a block when every wave in it already carries the same value.
fn block_omega(comps: &Components, block: &[usize]) -> Option<f64> {
    let first = comps[block[0]].as_ref()?.0.wave.omega;
    block
        .iter()
        .all(|&j| {
            comps[j]
                .as_ref()
                .is_some_and(|(f, _)| f.wave.omega == first)
        })
        .then_some(first)
}

/// Two-nested backfitting: the outer pass walks the ω-blocks in label order,
/// searching each block's shared ω outside the per-wave fits.
fn nested_backfit(data: &TimeSeries, cfg: &FitConfig) -> Result<Backfitted> {
    let t = data.time_points();
    let x = data.values();
    let n = x.len();
    let settings = SearchSettings::from(cfg);
    let blocks = blocks_of(&cfg.omega_blocks);
    let mut comps: Components = vec![None; cfg.nback];
    let mut history = Vec::with_capacity(cfg.maxiter);
    let mut evals = 0u64;
    let mut stop_reason = StopReason::MaxIterations;

    for _pass in 0..cfg.maxiter {
        for block in &blocks {
            if let [j] = block[..] {
                let others = others_sum(&comps, n, &[j]);
                let partial: Vec<f64> = x.iter().zip(&others).map(|(a, b)| a - b).collect();
                let warm = comps[j].as_ref().map(|(f, _)| (f.wave.alpha, f.wave.omega));
                let fit = fit_wave(t, &partial, settings, None, warm)?;
                evals += fit.grid_evaluations;
                let fitted = fit.fitted(t);
                comps[j] = Some((fit, fitted));
            } else {
                let best = search_shared_omega(t, x, &comps, block, cfg);
                evals += best.evals;
                if !best.rss.is_finite() {
                    return Err(FmmError::FitFailed(
                        "no shared ω gives a valid fit for a restriction block".into(),
                    ));
                }
                comps = best.fits;
            }
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

/// Multicomponent fit with equality blocks on β and/or ω.
///
/// β blocks are imposed after backfitting by replacing the block's β values
/// with their angular mean. ω blocks share a single ω found by a nested search.
/// Identity blocks give exactly the [`fit_multi`] result.
pub fn fit_restricted(data: &TimeSeries, cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    check_data(data, cfg.nback)?;
    if !cfg.has_omega_restrictions() {
        return fit_multi(data, cfg);
    }
    let mut fitted = nested_backfit(data, cfg)?;
    if cfg.has_beta_restrictions() {
        restrict_betas(&mut fitted.waves, &cfg.beta_blocks)?;
    }
    finish(data, fitted)
}

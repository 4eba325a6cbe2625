//! Fitting pipelines: single wave, multicomponent backfitting and the
//! β/ω-restricted variants.
//!
//! Every pipeline returns a [`FitResult`] whose waves are labelled in
//! decreasing order of explained variance.

mod backfit;
mod mono;
mod r2;
mod restricted;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{FmmError, Result};
use crate::io::TimeSeries;
use crate::signal::{FmmModel, PeakReport};

pub use crate::circular::angular_mean;
pub use backfit::fit_multi;
pub use mono::fit_mono;
pub use r2::{attribute_wave_r2, r_squared};
pub use restricted::fit_restricted;

/// When the backfitting loop may stop before `maxiter` passes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule {
    /// Run all `maxiter` passes.
    AlwaysFalse,
    /// Stop once `R²_k − R²_{k−1} ≤ dif_max`.
    R2Delta(f64),
}

/// Fitting knobs. Defaults: 48×24 grid, 3 refinement rounds, `maxiter = nback`,
/// no restrictions, serial evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub nback: usize,
    pub length_alpha_grid: usize,
    pub length_omega_grid: usize,
    pub num_reps: usize,
    pub maxiter: usize,
    pub stop_rule: StopRule,
    pub beta_blocks: Vec<u32>,
    pub omega_blocks: Vec<u32>,
    pub parallelize: bool,
}

impl FitConfig {
    pub fn new(nback: usize) -> Self {
        let identity: Vec<u32> = (1..=nback as u32).collect();
        FitConfig {
            nback,
            length_alpha_grid: 48,
            length_omega_grid: 24,
            num_reps: 3,
            maxiter: nback,
            stop_rule: StopRule::AlwaysFalse,
            beta_blocks: identity.clone(),
            omega_blocks: identity,
            parallelize: false,
        }
    }

    pub fn with_grid(mut self, alpha: usize, omega: usize) -> Self {
        self.length_alpha_grid = alpha;
        self.length_omega_grid = omega;
        self
    }

    pub fn with_num_reps(mut self, num_reps: usize) -> Self {
        self.num_reps = num_reps;
        self
    }

    pub fn with_maxiter(mut self, maxiter: usize) -> Self {
        self.maxiter = maxiter;
        self
    }

    pub fn with_stop_rule(mut self, rule: StopRule) -> Self {
        self.stop_rule = rule;
        self
    }

    pub fn with_beta_blocks(mut self, blocks: Vec<u32>) -> Self {
        self.beta_blocks = blocks;
        self
    }

    pub fn with_omega_blocks(mut self, blocks: Vec<u32>) -> Self {
        self.omega_blocks = blocks;
        self
    }

    pub fn parallel(mut self, on: bool) -> Self {
        self.parallelize = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.nback < 1 {
            return Err(FmmError::config("nback must be at least 1"));
        }
        if self.length_alpha_grid < 2 || self.length_omega_grid < 2 {
            return Err(FmmError::config("grid lengths must be at least 2"));
        }
        if self.num_reps < 1 {
            return Err(FmmError::config("num_reps must be at least 1"));
        }
        if self.maxiter < 1 {
            return Err(FmmError::config("maxiter must be at least 1"));
        }
        if let StopRule::R2Delta(d) = self.stop_rule {
            if !(d > 0.0) {
                return Err(FmmError::config(format!(
                    "difMax must be positive, got {d}"
                )));
            }
        }
        validate_blocks("beta", &self.beta_blocks, self.nback)?;
        validate_blocks("omega", &self.omega_blocks, self.nback)?;
        Ok(())
    }

    pub(crate) fn has_beta_restrictions(&self) -> bool {
        !all_distinct(&self.beta_blocks)
    }

    pub(crate) fn has_omega_restrictions(&self) -> bool {
        !all_distinct(&self.omega_blocks)
    }
}

fn all_distinct(labels: &[u32]) -> bool {
    labels.iter().collect::<BTreeSet<_>>().len() == labels.len()
}

/// Labels must cover `1..=d` without gaps.
fn validate_blocks(name: &str, labels: &[u32], nback: usize) -> Result<()> {
    if labels.len() != nback {
        return Err(FmmError::config(format!(
            "{name} restrictions have {} labels for {nback} waves",
            labels.len()
        )));
    }
    let set: BTreeSet<u32> = labels.iter().copied().collect();
    if set.contains(&0) {
        return Err(FmmError::config(format!(
            "{name} restriction labels must be positive"
        )));
    }
    let max = set.iter().max().copied().unwrap_or(0);
    if let Some(missing) = (1..=max).find(|l| !set.contains(l)) {
        return Err(FmmError::config(format!(
            "{name} restriction block {missing} contains no wave"
        )));
    }
    Ok(())
}

/// Wave indices grouped by label, blocks ordered by label.
pub(crate) fn blocks_of(labels: &[u32]) -> Vec<Vec<usize>> {
    let set: BTreeSet<u32> = labels.iter().copied().collect();
    set.into_iter()
        .map(|l| (0..labels.len()).filter(|&j| labels[j] == l).collect())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StopReason {
    /// Single-wave fit; no backfitting.
    #[default]
    SingleWave,
    MaxIterations,
    StopRule,
}

/// Bookkeeping that is not part of the serialized result.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FitDiagnostics {
    pub stop_reason: StopReason,
    /// Objective evaluations spent on grid search (all waves, all passes).
    pub grid_evaluations: u64,
    /// `R²` after each backfitting pass, before the joint amplitude fit.
    pub r2_history: Vec<f64>,
    /// SSE of the assembled backfitting model right before the joint amplitude fit.
    pub pre_finish_sse: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: FmmModel,
    pub time_points: Vec<f64>,
    pub fitted_values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub sse: f64,
    /// Explained variance attributed to each wave, in model order.
    pub r2: Vec<f64>,
    pub r2_total: f64,
    pub n_iter: usize,
    pub peaks: PeakReport,
    pub diagnostics: FitDiagnostics,
}

impl FitResult {
    /// Console line describing why the fit stopped.
    pub fn stop_message(&self) -> String {
        match self.diagnostics.stop_reason {
            StopReason::SingleWave => "Single wave fitted".to_string(),
            StopReason::MaxIterations => format!(
                "Stopped by reaching maximum iterations ( {} iterations )",
                self.n_iter
            ),
            StopReason::StopRule => {
                format!("Stopped by the stopFunction ( {} iterations )", self.n_iter)
            }
        }
    }
}

/// Fits the model the configuration asks for: a single wave, an unrestricted
/// backfitted model, or a restricted one.
pub fn fit(data: &TimeSeries, cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    if cfg.nback == 1 {
        fit_mono(data, cfg, None)
    } else if cfg.has_beta_restrictions() || cfg.has_omega_restrictions() {
        fit_restricted(data, cfg)
    } else {
        fit_multi(data, cfg)
    }
}

/// Serialized shape of the result; keys are part of the file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct FitResultRecord {
    #[serde(rename = "M")]
    pub intercept: f64,
    pub waves: Vec<crate::signal::WaveParams>,
    #[serde(rename = "SSE")]
    pub sse: f64,
    #[serde(rename = "R2")]
    pub r2: Vec<f64>,
    #[serde(rename = "R2_total")]
    pub r2_total: f64,
    #[serde(rename = "nIter")]
    pub n_iter: usize,
    pub peaks: PeakReport,
    #[serde(rename = "timePoints")]
    pub time_points: Vec<f64>,
    #[serde(rename = "fittedValues")]
    pub fitted_values: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl From<&FitResult> for FitResultRecord {
    fn from(r: &FitResult) -> Self {
        FitResultRecord {
            intercept: r.model.intercept,
            waves: r.model.waves.clone(),
            sse: r.sse,
            r2: r.r2.clone(),
            r2_total: r.r2_total,
            n_iter: r.n_iter,
            peaks: r.peaks.clone(),
            time_points: r.time_points.clone(),
            fitted_values: r.fitted_values.clone(),
            residuals: r.residuals.clone(),
        }
    }
}

impl TryFrom<FitResultRecord> for FitResult {
    type Error = FmmError;

    fn try_from(r: FitResultRecord) -> Result<Self> {
        let n = r.time_points.len();
        if r.fitted_values.len() != n || r.residuals.len() != n {
            return Err(FmmError::format(
                None,
                "timePoints, fittedValues and residuals must have equal lengths",
            ));
        }
        let m = r.waves.len();
        if r.r2.len() != m || r.peaks.waves.len() != m {
            return Err(FmmError::format(
                None,
                "R2 and peaks must have one entry per wave",
            ));
        }
        let model = FmmModel::new(r.intercept, r.waves)
            .map_err(|e| FmmError::format(None, format!("invalid model: {e}")))?;
        Ok(FitResult {
            model,
            time_points: r.time_points,
            fitted_values: r.fitted_values,
            residuals: r.residuals,
            sse: r.sse,
            r2: r.r2,
            r2_total: r.r2_total,
            n_iter: r.n_iter,
            peaks: r.peaks,
            diagnostics: FitDiagnostics::default(),
        })
    }
}

/// Builds the final result: per-wave attribution, relabelling by decreasing
/// explained variance, fitted values, residuals and fiducial points.
pub(crate) fn assemble(
    data: &TimeSeries,
    model: FmmModel,
    n_iter: usize,
    diagnostics: FitDiagnostics,
) -> Result<FitResult> {
    let x = data.values();
    let t = data.time_points();
    let per_wave = attribute_wave_r2(data, &model)?;

    let mut order: Vec<usize> = (0..model.order()).collect();
    order.sort_by(|&i, &j| per_wave[j].total_cmp(&per_wave[i]));
    let model = FmmModel {
        intercept: model.intercept,
        waves: order.iter().map(|&j| model.waves[j]).collect(),
    };
    let r2: Vec<f64> = order.iter().map(|&j| per_wave[j]).collect();

    let fitted_values = model.values(t);
    let residuals: Vec<f64> = x.iter().zip(&fitted_values).map(|(a, b)| a - b).collect();
    let sse = residuals.iter().map(|r| r * r).sum();
    let r2_total = r_squared(x, &fitted_values)?;
    let peaks = model.peaks(true)?;
    Ok(FitResult {
        model,
        time_points: t.to_vec(),
        fitted_values,
        residuals,
        sse,
        r2,
        r2_total,
        n_iter,
        peaks,
        diagnostics,
    })
}

/// Shared preconditions on the data.
pub(crate) fn check_data(data: &TimeSeries, nback: usize) -> Result<()> {
    let needed = (4 * nback + 1).max(5);
    if data.len() < needed {
        return Err(FmmError::config(format!(
            "fitting {nback} wave(s) needs at least {needed} observations, got {}",
            data.len()
        )));
    }
    let x = data.values();
    if x.iter().all(|v| *v == x[0]) {
        return Err(FmmError::UndefinedVariance);
    }
    Ok(())
}

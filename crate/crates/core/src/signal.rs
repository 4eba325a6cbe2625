//! The FMM model family: Möbius phase, single waves, multicomponent signals
//! and closed-form fiducial points.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::circular::wrap_angle;
use crate::error::{FmmError, Result};

/// One FMM wave `A·cos(φ(t; α, β, ω))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveParams {
    /// Amplitude, `A ≥ 0`.
    #[serde(rename = "A")]
    pub amplitude: f64,
    /// Phase translation, in `[0, 2π)`.
    pub alpha: f64,
    /// Skewness angle, in `[0, 2π)`.
    pub beta: f64,
    /// Kurtosis factor, in `[0, 1]`. Values near zero give spiked waves, `1` is a cosine.
    pub omega: f64,
}

impl WaveParams {
    /// Builds a wave, wrapping both angles into `[0, 2π)`.
    pub fn new(amplitude: f64, alpha: f64, beta: f64, omega: f64) -> Result<Self> {
        let w = WaveParams {
            amplitude,
            alpha: wrap_angle(alpha),
            beta: wrap_angle(beta),
            omega,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.amplitude, self.alpha, self.beta, self.omega]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(FmmError::config("wave parameters must be finite"));
        }
        if self.amplitude < 0.0 {
            return Err(FmmError::config(format!(
                "amplitude must be nonnegative, got {}",
                self.amplitude
            )));
        }
        if !(0.0..=1.0).contains(&self.omega) {
            return Err(FmmError::config(format!(
                "omega must lie in [0, 1], got {}",
                self.omega
            )));
        }
        if !(0.0..TAU).contains(&self.alpha) || !(0.0..TAU).contains(&self.beta) {
            return Err(FmmError::config("alpha and beta must lie in [0, 2π)"));
        }
        Ok(())
    }

    pub fn phase(&self, t: f64) -> f64 {
        mobius_phase(t, self.alpha, self.beta, self.omega)
    }

    pub fn value(&self, t: f64) -> f64 {
        wave_value(t, self)
    }

    pub fn peak_trough(&self, wrap_to_2pi: bool) -> Result<(f64, f64)> {
        peak_trough_times(self, wrap_to_2pi)
    }
}

/// Möbius-link phase `β + 2·arctan(ω·tan((t − α)/2))`, wrapped to `[0, 2π)`.
///
/// Evaluated through the half-angle `atan2` form, which agrees with the tangent
/// form everywhere it is defined and stays continuous through `t − α = π`.
pub fn mobius_phase(t: f64, alpha: f64, beta: f64, omega: f64) -> f64 {
    wrap_angle(beta + unwrapped_shift(t - alpha, omega))
}

/// `2·atan2(ω·sin(θ/2), cos(θ/2))`, i.e. the Möbius time warp of `θ` before wrapping.
#[inline]
pub(crate) fn unwrapped_shift(theta: f64, omega: f64) -> f64 {
    let (s, c) = (0.5 * theta).sin_cos();
    2.0 * (omega * s).atan2(c)
}

pub fn wave_value(t: f64, w: &WaveParams) -> f64 {
    // cos is 2π-periodic, so the unwrapped phase gives the same value with one fewer rounding
    w.amplitude * (w.beta + unwrapped_shift(t - w.alpha, w.omega)).cos()
}

/// Peak and trough times `(tU, tL)` of a single wave.
///
/// Without wrapping, the results follow the principal branch of the arctangent,
/// so they lie within `α ± π`.
pub fn peak_trough_times(w: &WaveParams, wrap_to_2pi: bool) -> Result<(f64, f64)> {
    if w.omega <= 0.0 {
        return Err(FmmError::DegenerateWave(
            "peak and trough are undefined for omega = 0".into(),
        ));
    }
    let half = 0.5 * w.beta;
    let t_upper = w.alpha + 2.0 * principal_atan(-half.sin(), w.omega * half.cos());
    let half = 0.5 * (PI - w.beta);
    let t_lower = w.alpha + 2.0 * principal_atan(half.sin(), w.omega * half.cos());
    if wrap_to_2pi {
        Ok((wrap_angle(t_upper), wrap_angle(t_lower)))
    } else {
        Ok((t_upper, t_lower))
    }
}

/// `arctan(y / x)` on `[-π/2, π/2]`, taking the limit when `x = 0`.
fn principal_atan(y: f64, x: f64) -> f64 {
    if x < 0.0 {
        (-y).atan2(-x)
    } else {
        y.atan2(x)
    }
}

/// Intercept plus an ordered list of waves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FmmModel {
    #[serde(rename = "M")]
    pub intercept: f64,
    pub waves: Vec<WaveParams>,
}

impl FmmModel {
    pub fn new(intercept: f64, waves: Vec<WaveParams>) -> Result<Self> {
        if waves.is_empty() {
            return Err(FmmError::config("a model needs at least one wave"));
        }
        if !intercept.is_finite() {
            return Err(FmmError::config("intercept must be finite"));
        }
        for w in &waves {
            w.validate()?;
        }
        Ok(FmmModel { intercept, waves })
    }

    pub fn order(&self) -> usize {
        self.waves.len()
    }

    pub fn value(&self, t: f64) -> f64 {
        model_value(t, self)
    }

    pub fn values(&self, t: &[f64]) -> Vec<f64> {
        t.iter().map(|&ti| model_value(ti, self)).collect()
    }

    /// Contribution of wave `j` at each time point, without the intercept.
    pub fn component_values(&self, j: usize, t: &[f64]) -> Vec<f64> {
        let w = &self.waves[j];
        t.iter().map(|&ti| wave_value(ti, w)).collect()
    }

    /// Peak and trough times of every wave, with total-model signal values there.
    pub fn peaks(&self, wrap_to_2pi: bool) -> Result<PeakReport> {
        let waves = self
            .waves
            .iter()
            .map(|w| {
                let (t_upper, t_lower) = peak_trough_times(w, wrap_to_2pi)?;
                Ok(WavePeak {
                    t_upper,
                    z_upper: self.value(t_upper),
                    t_lower,
                    z_lower: self.value(t_lower),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PeakReport { waves })
    }
}

pub fn model_value(t: f64, model: &FmmModel) -> f64 {
    model.intercept + model.waves.iter().map(|w| wave_value(t, w)).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePeak {
    #[serde(rename = "tU")]
    pub t_upper: f64,
    #[serde(rename = "tL")]
    pub t_lower: f64,
    #[serde(rename = "ZU")]
    pub z_upper: f64,
    #[serde(rename = "ZL")]
    pub z_lower: f64,
}

/// Fiducial points for each wave, in model order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PeakReport {
    pub waves: Vec<WavePeak>,
}

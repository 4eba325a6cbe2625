//! Synthetic data from an FMM model, optionally with gaussian noise.

use std::f64::consts::TAU;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{FmmError, Result};
use crate::signal::{FmmModel, WaveParams};

/// Generator input. Wave-parameter lists are recycled cyclically to the longest one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    #[serde(rename = "M")]
    pub intercept: f64,
    #[serde(rename = "A")]
    pub amplitude: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub omega: Vec<f64>,
    pub from: f64,
    pub to: f64,
    pub length_out: usize,
    /// Overrides `from`, `to` and `length_out` when set.
    pub time_points: Option<Vec<f64>>,
    pub sigma_noise: f64,
    pub seed: Option<u64>,
}

impl GenSpec {
    pub fn new(
        intercept: f64,
        amplitude: Vec<f64>,
        alpha: Vec<f64>,
        beta: Vec<f64>,
        omega: Vec<f64>,
    ) -> Self {
        GenSpec {
            intercept,
            amplitude,
            alpha,
            beta,
            omega,
            from: 0.0,
            to: TAU,
            length_out: 100,
            time_points: None,
            sigma_noise: 0.0,
            seed: None,
        }
    }

    pub fn with_noise(mut self, sigma: f64, seed: Option<u64>) -> Self {
        self.sigma_noise = sigma;
        self.seed = seed;
        self
    }

    pub fn with_time_points(mut self, t: Vec<f64>) -> Self {
        self.time_points = Some(t);
        self
    }

    pub fn with_range(mut self, from: f64, to: f64, length_out: usize) -> Self {
        self.from = from;
        self.to = to;
        self.length_out = length_out;
        self
    }

    /// The model after recycling the parameter lists.
    pub fn model(&self) -> Result<FmmModel> {
        let lists = [&self.amplitude, &self.alpha, &self.beta, &self.omega];
        if lists.iter().any(|l| l.is_empty()) {
            return Err(FmmError::config(
                "A, alpha, beta and omega each need at least one value",
            ));
        }
        let m = lists.iter().map(|l| l.len()).max().unwrap_or(0);
        let at = |l: &[f64], j: usize| l[j % l.len()];
        let waves = (0..m)
            .map(|j| {
                WaveParams::new(
                    at(&self.amplitude, j),
                    at(&self.alpha, j),
                    at(&self.beta, j),
                    at(&self.omega, j),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        FmmModel::new(self.intercept, waves)
    }

    /// Time grid: explicit points, or `length_out` points from `from` to `to` inclusive.
    pub fn times(&self) -> Result<Vec<f64>> {
        if let Some(t) = &self.time_points {
            if t.is_empty() {
                return Err(FmmError::config("time points must not be empty"));
            }
            if t.iter().any(|v| !v.is_finite()) || t.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(FmmError::config(
                    "time points must be finite and strictly increasing",
                ));
            }
            return Ok(t.clone());
        }
        Ok(seq(self.from, self.to, self.length_out))
    }
}

/// `n` equally spaced values from `from` to `to`, both included.
pub fn seq(from: f64, to: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![from],
        _ => {
            let step = (to - from) / (n - 1) as f64;
            (0..n)
                .map(|i| {
                    if i + 1 == n {
                        to
                    } else {
                        from + i as f64 * step
                    }
                })
                .collect()
        }
    }
}

/// Generator output: the input echo, the time grid and the simulated values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generated {
    pub input: GenSpec,
    pub t: Vec<f64>,
    pub y: Vec<f64>,
}

/// Evaluates the model on the time grid and adds `Normal(0, σ²)` noise.
///
/// Without a seed the noise stream is seeded from the operating system.
pub fn generate(spec: &GenSpec) -> Result<Generated> {
    if !(spec.sigma_noise >= 0.0) || !spec.sigma_noise.is_finite() {
        return Err(FmmError::config(format!(
            "sigma_noise must be nonnegative, got {}",
            spec.sigma_noise
        )));
    }
    let model = spec.model()?;
    let t = spec.times()?;
    if t.is_empty() {
        return Err(FmmError::config("length_out must be at least 1"));
    }
    let mut y = model.values(&t);
    if spec.sigma_noise > 0.0 {
        let mut rng = match spec.seed {
            Some(s) => ChaCha8Rng::seed_from_u64(s),
            None => ChaCha8Rng::from_os_rng(),
        };
        let normal = Normal::new(0.0, spec.sigma_noise)
            .map_err(|e| FmmError::config(format!("invalid noise level: {e}")))?;
        for v in &mut y {
            *v += normal.sample(&mut rng);
        }
    }
    Ok(Generated {
        input: spec.clone(),
        t,
        y,
    })
}

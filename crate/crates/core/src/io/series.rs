use std::f64::consts::TAU;

use crate::error::{FmmError, Result};

/// Observations on one period, with time already mapped to radians.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    time_points: Vec<f64>,
    values: Vec<f64>,
    n_periods: usize,
    raw_values: Option<Vec<f64>>,
}

impl TimeSeries {
    /// Single-period series. Time points must be strictly increasing within `[0, 2π]`.
    pub fn new(time_points: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        validate_times(&time_points)?;
        if time_points.len() != values.len() {
            return Err(FmmError::config(format!(
                "{} time points but {} values",
                time_points.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(FmmError::format(None, "values must be finite"));
        }
        Ok(TimeSeries {
            time_points,
            values,
            n_periods: 1,
            raw_values: None,
        })
    }

    /// Values at `2π·i/n`, `i = 0..n`.
    pub fn equally_spaced(values: Vec<f64>) -> Result<Self> {
        let t = equally_spaced_times(values.len());
        Self::new(t, values)
    }

    pub fn time_points(&self) -> &[f64] {
        &self.time_points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn n_periods(&self) -> usize {
        self.n_periods
    }

    /// Unaveraged multi-period data, when the series was summarised.
    pub fn raw_values(&self) -> Option<&[f64]> {
        self.raw_values.as_deref()
    }

    /// Same time points with new values (e.g. a transformed signal).
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.time_points.clone(), values)
    }
}

pub fn equally_spaced_times(n: usize) -> Vec<f64> {
    (0..n).map(|i| TAU * i as f64 / n as f64).collect()
}

fn validate_times(t: &[f64]) -> Result<()> {
    if let Some(bad) = t.iter().find(|v| !(0.0..=TAU).contains(*v)) {
        return Err(FmmError::format(
            None,
            format!("time point {bad} outside [0, 2π]; rescale with a period first"),
        ));
    }
    if let Some(i) = t.windows(2).position(|w| !(w[0] < w[1])) {
        return Err(FmmError::format(
            None,
            format!("time points must be strictly increasing (index {})", i + 1),
        ));
    }
    Ok(())
}

/// Maps raw times in `[t0, t0 + period]` onto radians: `(t′ − t0)·2π / period`.
pub fn rescale_time(t_prime: &[f64], t0: f64, period: f64) -> Result<Vec<f64>> {
    if !(period > 0.0) || !period.is_finite() {
        return Err(FmmError::config(format!(
            "period must be positive, got {period}"
        )));
    }
    Ok(t_prime.iter().map(|t| (t - t0) * TAU / period).collect())
}

/// Averages `raw` (laid out period after period) at each within-period index.
///
/// Time points default to `2π·i/n`.
pub fn summarize_periods(
    raw: Vec<f64>,
    n_periods: usize,
    time_points: Option<Vec<f64>>,
) -> Result<TimeSeries> {
    if n_periods == 0 {
        return Err(FmmError::config("n_periods must be at least 1"));
    }
    if raw.is_empty() || !raw.len().is_multiple_of(n_periods) {
        return Err(FmmError::format(
            None,
            format!(
                "{} observations cannot be split into {} equal periods",
                raw.len(),
                n_periods
            ),
        ));
    }
    let n = raw.len() / n_periods;
    let time_points = time_points.unwrap_or_else(|| equally_spaced_times(n));
    if n_periods == 1 {
        return TimeSeries::new(time_points, raw);
    }
    let values: Vec<f64> = (0..n)
        .map(|i| (0..n_periods).map(|k| raw[i + k * n]).sum::<f64>() / n_periods as f64)
        .collect();
    let mut series = TimeSeries::new(time_points, values)?;
    series.n_periods = n_periods;
    series.raw_values = Some(raw);
    Ok(series)
}

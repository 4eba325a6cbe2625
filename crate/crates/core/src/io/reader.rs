use std::f64::consts::TAU;
use std::path::Path;

use crate::error::{FmmError, Result};
use crate::io::series::{rescale_time, summarize_periods, TimeSeries};

/// Tolerance when checking that later periods repeat the first period's phases.
const PHASE_TOL: f64 = 1e-9;

/// How to interpret a CSV time series.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvOptions {
    /// `None` infers it from the column count (one column: values only).
    pub has_time_column: Option<bool>,
    pub n_periods: usize,
    /// Period of the raw time column; times are rescaled to radians when set.
    pub period: Option<f64>,
    pub t0: f64,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            has_time_column: None,
            n_periods: 1,
            period: None,
            t0: 0.0,
        }
    }
}

pub fn read_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<TimeSeries> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| FmmError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_csv(&bytes, opts)
}

/// Parses CSV bytes: mandatory header, then one (`value`) or two (`time,value`) numeric columns.
pub fn parse_csv(bytes: &[u8], opts: &CsvOptions) -> Result<TimeSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);

    let headers = reader
        .headers()
        .map_err(|e| FmmError::format(Some(1), e.to_string()))?
        .clone();
    if headers.iter().all(|h| h.is_empty()) {
        return Err(FmmError::format(Some(1), "missing header row"));
    }
    if headers.iter().any(|h| h.parse::<f64>().is_ok()) {
        return Err(FmmError::format(
            Some(1),
            "header row is numeric; a header is required",
        ));
    }
    let width = headers.len();
    let has_time = match (opts.has_time_column, width) {
        (Some(true), 2) | (None, 2) => true,
        (Some(false), 1) | (None, 1) => false,
        _ => {
            return Err(FmmError::format(
                Some(1),
                format!("expected 1 (value) or 2 (time,value) columns, found {width}"),
            ))
        }
    };

    let mut times = Vec::new();
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line());
            FmmError::format(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line());
        if record.len() != width {
            return Err(FmmError::format(
                line,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        let cell = |i: usize| -> Result<f64> {
            let s = &record[i];
            match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(FmmError::format(
                    line,
                    format!("not a finite number: {s:?}"),
                )),
            }
        };
        if has_time {
            times.push(cell(0)?);
            values.push(cell(1)?);
        } else {
            values.push(cell(0)?);
        }
    }
    if values.len() < 5 {
        return Err(FmmError::format(
            None,
            format!("at least 5 data rows are required, found {}", values.len()),
        ));
    }
    if opts.n_periods == 0 {
        return Err(FmmError::config("n_periods must be at least 1"));
    }
    if !values.len().is_multiple_of(opts.n_periods) {
        return Err(FmmError::format(
            None,
            format!(
                "{} rows cannot be split into {} equal periods",
                values.len(),
                opts.n_periods
            ),
        ));
    }

    let time_points = if has_time {
        if let Some(i) = times.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(FmmError::format(
                Some(i as u64 + 3),
                "time column must be strictly increasing",
            ));
        }
        let t = match opts.period {
            Some(p) => rescale_time(&times, opts.t0, p)?,
            None => times,
        };
        Some(fold_periods(&t, opts.n_periods)?)
    } else {
        None
    };
    summarize_periods(values, opts.n_periods, time_points)
}

/// First-period time points, after checking every later period sits at the
/// same within-period phases.
fn fold_periods(t: &[f64], n_periods: usize) -> Result<Vec<f64>> {
    let n = t.len() / n_periods;
    for k in 1..n_periods {
        for i in 0..n {
            let expected = t[i] + TAU * k as f64;
            if (t[i + k * n] - expected).abs() > PHASE_TOL * expected.abs().max(1.0) {
                return Err(FmmError::format(
                    Some((i + k * n) as u64 + 2),
                    format!(
                        "period {} is not aligned with the first period (ragged periods are not supported)",
                        k + 1
                    ),
                ));
            }
        }
    }
    Ok(t[..n].to_vec())
}

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::Formatter;

use crate::error::{FmmError, Result};
use crate::estimation::{FitResult, FitResultRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResultFormat {
    Json,
    CsvFitted,
    CsvComponents,
}

/// Formats `v` with 17 significant digits; enough to round-trip any `f64`.
pub fn format_f64(v: f64) -> String {
    if v == 0.0 {
        // keep the sign of negative zero
        return if v.is_sign_negative() {
            "-0.0".into()
        } else {
            "0.0".into()
        };
    }
    format!("{v:.16e}")
}

/// Compact JSON with every float written by [`format_f64`]; non-finite values become `null`.
struct SeventeenDigits;

impl Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            writer.write_all(format_f64(value).as_bytes())
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_json(result: &FitResult) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SeventeenDigits);
    FitResultRecord::from(result).serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

/// Parses a result written by [`to_json`].
pub fn from_json(bytes: &[u8]) -> Result<FitResult> {
    let record: FitResultRecord = serde_json::from_slice(bytes)
        .map_err(|e| FmmError::format(Some(e.line() as u64), format!("invalid fit result: {e}")))?;
    FitResult::try_from(record)
}

pub fn write_result(result: &FitResult, format: ResultFormat) -> Result<Vec<u8>> {
    match format {
        ResultFormat::Json => to_json(result),
        ResultFormat::CsvFitted => {
            let rows = result
                .time_points
                .iter()
                .zip(&result.fitted_values)
                .map(|(t, f)| vec![*t, *f]);
            Ok(csv_table(&["timePoints", "fitted"], rows))
        }
        ResultFormat::CsvComponents => {
            let m = result.model.order();
            let names: Vec<String> = (1..=m).map(|j| format!("wave{j}")).collect();
            let mut header = vec!["timePoints"];
            header.extend(names.iter().map(String::as_str));
            let t = &result.time_points;
            let columns: Vec<Vec<f64>> = (0..m)
                .map(|j| result.model.component_values(j, t))
                .collect();
            let rows = t.iter().enumerate().map(|(i, &ti)| {
                std::iter::once(ti)
                    .chain(columns.iter().map(|c| c[i]))
                    .collect()
            });
            Ok(csv_table(&header, rows))
        }
    }
}

/// Comma-separated table with LF line endings and [`format_f64`] numbers.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Vec<u8> {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().map(format_f64).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

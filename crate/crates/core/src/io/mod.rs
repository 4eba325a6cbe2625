//! CSV ingestion, time rescaling, multi-period averaging and result export.

mod reader;
pub mod series;
mod writer;

pub use reader::{parse_csv, read_csv, CsvOptions};
pub use series::{equally_spaced_times, rescale_time, summarize_periods, TimeSeries};
pub use writer::{csv_table, format_f64, from_json, to_json, write_result, ResultFormat};

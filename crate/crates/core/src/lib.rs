//! Frequency Modulated Möbius (FMM) models for oscillatory signals.
//!
//! A wave is `A·cos(β + 2·atan(ω·tan((t − α)/2)))` on `t ∈ [0, 2π)`; a model is
//! an intercept plus a sum of waves. The crate fits single-wave,
//! multicomponent and shape-restricted models, simulates data, and reports
//! peak and trough times.
//!
//! ```
//! use fmm::{fit, FitConfig, GenSpec, TimeSeries};
//!
//! let spec = GenSpec::new(0.0, vec![2.0], vec![1.5], vec![0.2], vec![0.1]).with_range(0.0, 6.2, 60);
//! let sim = fmm::generate(&spec).unwrap();
//! let data = TimeSeries::new(sim.t, sim.y).unwrap();
//! let result = fit(&data, &FitConfig::new(1)).unwrap();
//! assert!(result.r2_total > 0.999);
//! ```

// NaN-rejecting comparisons are written as negated orderings on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod circular;
pub mod cli;
pub mod error;
pub mod estimation;
pub mod io;
pub mod optimizer;
pub mod plot;
pub mod signal;
pub mod simulation;

pub use error::{FmmError, Result};
pub use estimation::{fit, fit_mono, fit_multi, fit_restricted, FitConfig, FitResult, StopRule};
pub use io::{read_csv, write_result, CsvOptions, ResultFormat, TimeSeries};
pub use signal::{FmmModel, PeakReport, WaveParams};
pub use simulation::{generate, GenSpec, Generated};

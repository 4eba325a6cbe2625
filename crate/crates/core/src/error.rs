use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = FmmError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum FmmError {
    /// Invalid configuration or arguments (bad block labels, too few points, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed input data. `line` is 1-based when known.
    #[error("format error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Format { line: Option<u64>, message: String },

    #[error("degenerate design matrix: {0}")]
    DegenerateDesign(String),

    #[error("degenerate wave: {0}")]
    DegenerateWave(String),

    #[error("angular mean undefined: resultant length {0:e}")]
    UndefinedMean(f64),

    #[error("variance undefined: data is constant")]
    UndefinedVariance,

    #[error("fit failed: {0}")]
    FitFailed(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl FmmError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        FmmError::Config(msg.into())
    }

    pub(crate) fn format(line: Option<u64>, msg: impl Into<String>) -> Self {
        FmmError::Format {
            line,
            message: msg.into(),
        }
    }
}

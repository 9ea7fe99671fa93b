use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("codebook size {0} is not a positive multiple of 4")]
    CodebookSize(u32),

    #[error("quadrature did not reach tolerance {tolerance:e} (estimate {estimate}, error {error:e})")]
    Quadrature {
        estimate: f64,
        error: f64,
        tolerance: f64,
    },

    #[error(
        "series did not converge within {terms} terms (partial value {partial}, tail bound {tail_bound:e})"
    )]
    SeriesNonConvergence {
        partial: f64,
        tail_bound: f64,
        terms: usize,
    },

    #[error("beam-training overhead {overhead_ms} ms is not below travel time {travel_ms} ms")]
    OverheadSaturated { overhead_ms: f64, travel_ms: f64 },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

/// Rejects NaN, infinities and values below `min`.
pub(crate) fn check_finite_at_least(name: &'static str, value: f64, min: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::invalid(name, format!("must be finite, got {value}")));
    }
    if value < min {
        return Err(Error::invalid(name, format!("must be >= {min}, got {value}")));
    }
    Ok(())
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::invalid(name, format!("must be finite and > 0, got {value}")));
    }
    Ok(())
}

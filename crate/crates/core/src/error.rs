use serde::Serialize;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Which side of the attainable bond-price band a strike fell on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StrikeSide {
    /// `K <= P-`: the option finishes in the money for every driver value.
    BelowRange,
    /// `K >= P+`: the option can never finish in the money.
    AboveRange,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("strike {strike} is outside the attainable price band ({side:?}, P-={lower}, P+={upper})")]
    StrikeOutOfRange {
        strike: f64,
        side: StrikeSide,
        lower: f64,
        upper: f64,
    },

    #[error("unsupported model: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

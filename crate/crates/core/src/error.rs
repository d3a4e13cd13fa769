use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside what a kernel or format can represent.
    #[error("value {value} outside range [{min}, {max}]")]
    Range { value: f64, min: f64, max: f64 },

    /// Input outside the mathematical domain of the function (log of a negative, ...).
    #[error("{function}: input {value} outside domain")]
    Domain { function: &'static str, value: f64 },

    #[error("Q3.28 overflow in {0}")]
    Overflow(&'static str),

    #[error("{function} is not supported by method {method}")]
    UnsupportedCombination { function: String, method: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("table format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn range(value: f64, min: f64, max: f64) -> Self {
        Error::Range { value, min, max }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }
}

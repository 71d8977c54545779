use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("value {value} outside the attainable range [{lo}, {hi}]")]
    Range { value: f64, lo: f64, hi: f64 },

    #[error("truncation insufficient: tail mass {tail:e} must stay below {limit:e}")]
    TruncationInsufficient { tail: f64, limit: f64 },

    #[error("outside RKHS (numerically): projection residual {residual:e} exceeds {tolerance:e}")]
    OutsideRkhs { residual: f64, tolerance: f64 },

    #[error("probability too small for plain MC at this N: {hits} hits out of {samples}")]
    RareEvent { hits: u64, samples: u64 },

    #[error("characteristic-function inversion failed ({0}); use tilted-mc")]
    InversionFailed(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn numeric(msg: impl Into<String>) -> Error {
    Error::Numeric(msg.into())
}

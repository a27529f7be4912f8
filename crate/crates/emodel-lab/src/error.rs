use thiserror::Error;

/// Errors raised by the numerical kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("singular {what} (condition number {condition:e})")]
    Singular { what: &'static str, condition: f64 },

    #[error("pole: denominator `{denominator}` vanishes")]
    Pole { denominator: &'static str },

    #[error("chart domain violated: |chi| = {norm}")]
    ChartDomain { norm: f64 },

    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },

    #[error("model mismatch: {0}")]
    KindMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dims(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left, right })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be positive and finite, got {value}"),
        })
    }
}

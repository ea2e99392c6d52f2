use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("seed vectors are not orthonormal (deviation {0:.3e})")]
    NotOrthonormal(f64),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("malformed density operator: {0}")]
    MalformedDensity(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64, range: &'static str) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value, range })
    }
}

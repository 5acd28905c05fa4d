use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point outside the unit disk: rho = {rho}")]
    OutsideDisk { rho: f64 },

    #[error("invalid Stolz aperture {0}: must be a positive finite number")]
    InvalidAperture(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("sequence is not separated (separation constant {delta})")]
    NotSeparated { delta: f64 },

    #[error("index {index} is beyond the tabulated range (len {len})")]
    OutOfTable { index: usize, len: usize },

    #[error("mismatched apertures: {0} vs {1}")]
    ApertureMismatch(f64, f64),

    /// The requested computation is mathematically vacuous; `certificate`
    /// says why (e.g. a certified convergent series).
    #[error("refused: {reason}")]
    Refused { reason: String, certificate: String },

    #[error("construction too large: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

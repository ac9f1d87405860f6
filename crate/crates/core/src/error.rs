use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension {requested} exceeds the hard cap of {cap}")]
    DimensionOverflow { requested: usize, cap: usize },

    #[error("degenerate state: {0}")]
    DegenerateState(&'static str),

    #[error("shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: usize, right: usize },

    #[error("truncation too tight: norm deficit {deficit:e} exceeds {tolerance:e}")]
    Truncation { deficit: f64, tolerance: f64 },

    #[error("integration diverged: trace drift {drift:e}")]
    IntegrationDiverged { drift: f64 },

    #[error("both measurement branches vanish (traces {upper:e}, {lower:e})")]
    NumericalDegeneracy { upper: f64, lower: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

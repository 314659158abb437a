use thiserror::Error;

use crate::scalar::ScalarMode;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("scalar mode mismatch: {left} vs {right}")]
    ModeMismatch { left: ScalarMode, right: ScalarMode },

    #[error("series is not invertible: constant term is zero")]
    NonInvertible,

    #[error("composition requires an inner series without constant term")]
    CompositionDomain,

    #[error("reversion requires zero constant term and nonzero linear term")]
    ReversionSingular,

    #[error("square root requires constant term 1; normalize first")]
    SqrtNormalization,

    #[error("moment sequence must start with m0 = 1")]
    Normalization,

    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("requested length {requested} exceeds supported order {supported}")]
    OrderExceeded { requested: usize, supported: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("analytic route unavailable: {0}")]
    AnalyticRouteUnavailable(String),

    #[error("branch check failed: {0}")]
    Branch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable kind, used in CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ModeMismatch { .. } => "mode_mismatch",
            Error::NonInvertible => "non_invertible_series",
            Error::CompositionDomain => "composition_domain",
            Error::ReversionSingular => "reversion_singularity",
            Error::SqrtNormalization => "normalize_first",
            Error::Normalization => "normalization",
            Error::OrderMismatch { .. } => "order_mismatch",
            Error::OrderExceeded { .. } => "order_exceeded",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::AnalyticRouteUnavailable(_) => "analytic_route_unavailable",
            Error::Branch(_) => "branch",
            Error::Precondition(_) => "precondition",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

use crate::domain::Realization;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found} ({context})")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        context: &'static str,
    },

    #[error("odd rank {0} exceeds the supported maximum of 16")]
    RankTooLarge(usize),

    #[error("odd index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },

    #[error("realization mismatch: expected {expected:?}, found {found:?}")]
    RealizationMismatch {
        expected: Realization,
        found: Realization,
    },

    #[error("element is not a group member: {0}")]
    NotAMember(String),

    #[error("vanishing denominator c z + d at the requested point")]
    VanishingDenominator,

    #[error("pole of the Cayley cocycle")]
    CayleyPole,

    #[error("point lies on the boundary of the {0:?} domain")]
    BoundaryPoint(Realization),

    #[error("point lies outside the {0:?} domain")]
    OutsideDomain(Realization),

    #[error("singular matrix")]
    Singular,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("quadrature budget too small: {points} points (minimum {minimum})")]
    QuadratureBudget { points: usize, minimum: usize },

    #[error("positive frequency {0} present: handled by the Koecher check")]
    PositiveFrequency(f64),

    #[error("weight {k} is below the threshold {threshold} required for this verdict")]
    BelowThreshold { k: i64, threshold: i64 },

    #[error("invalid function spec: {0}")]
    FunctionSpec(String),
}

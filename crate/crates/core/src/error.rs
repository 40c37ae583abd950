use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid field d = {0}: {1}")]
    InvalidField(i128, String),
    #[error("zero element where a unit of K is required")]
    ZeroElement,
    #[error("element is not totally positive: {0}")]
    NotTotallyPositive(String),
    #[error("element is not integral: {0}")]
    NotIntegral(String),
    #[error("operands belong to different fields ({0} vs {1})")]
    MixedFields(i128, i128),
    #[error("level {level} is insufficient: need a multiple of {needed}")]
    InsufficientLevel { level: i128, needed: i128 },
    #[error("boundary set is empty: no ground states exist")]
    EmptyBoundary,
    #[error("invalid groupoid: {0}")]
    InvalidGroupoid(String),
    #[error("measure is not a probability measure: {0}")]
    NonNormalizedMeasure(String),
    #[error("beta = {0} is outside the supported range beta > 1")]
    BetaOutOfRange(f64),
    #[error("coefficients are not cyclotomic")]
    NonCyclotomic,
    #[error("not a prime: {0}")]
    NotPrime(i128),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("relation {relation} failed at {witness}")]
    RelationFailed { relation: String, witness: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidField(..) => "invalid_field",
            Error::ZeroElement => "zero_element",
            Error::NotTotallyPositive(_) => "not_totally_positive",
            Error::NotIntegral(_) => "not_integral",
            Error::MixedFields(..) => "mixed_fields",
            Error::InsufficientLevel { .. } => "insufficient_level",
            Error::EmptyBoundary => "empty_boundary",
            Error::InvalidGroupoid(_) => "invalid_groupoid",
            Error::NonNormalizedMeasure(_) => "non_normalized_measure",
            Error::BetaOutOfRange(_) => "beta_out_of_range",
            Error::NonCyclotomic => "non_cyclotomic",
            Error::NotPrime(_) => "not_prime",
            Error::Consistency(_) => "consistency",
            Error::Parse(_) => "parse",
            Error::RelationFailed { .. } => "relation_failed",
        }
    }
}

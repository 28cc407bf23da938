use thiserror::Error;

use crate::instance::ModelTier;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate entity `{0}`")]
    DuplicateEntity(String),
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("order of `{owner}` is missing `{missing}`")]
    MissingEntity { owner: String, missing: String },
    #[error("order of `{0}` ties a real entity with the null marker")]
    NullTied(String),
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("claimed tier `{claimed}` is stricter than the detected tier `{detected}`")]
    TierTooStrict { claimed: ModelTier, detected: ModelTier },
    #[error("operation requires the `{required}` tier, got `{actual}`")]
    UnsupportedTier { required: ModelTier, actual: ModelTier },
    #[error("enumeration cap exceeded: n+m = {size} > {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("entity is not rankable here: {0}")]
    NotRankable(String),
    #[error("matching is not deterministic")]
    NotDeterministic,
    #[error("strict order required; `{0}` has ties")]
    TiesInOrder(String),
    #[error("associated matching does not belong to this matching")]
    PairMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;

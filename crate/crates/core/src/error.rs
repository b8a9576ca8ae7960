use thiserror::Error;

/// Errors produced by the laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HmpError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The decoded matching index lies outside the family, so the relation
    /// has no correct answer for this instance.
    #[error("matching index {index} is outside the family of {t} matchings")]
    RelationUndefined { index: usize, t: usize },

    /// A search or enumeration was refused because it exceeds the declared limit.
    #[error("refused: {reason} (estimated size 2^{log2_size:.1})")]
    Refused { reason: String, log2_size: f64 },
}

impl HmpError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        HmpError::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, HmpError>;

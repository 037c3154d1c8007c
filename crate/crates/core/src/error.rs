use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} is outside the supported range 1..=128")]
    UnsupportedDimension(usize),

    #[error("bits set beyond dimension {0}")]
    StrayBits(usize),

    #[error("degenerate face: both endpoints are the same vertex")]
    DegenerateFace,

    #[error("coordinate {index} has value {value}, expected 0 or 1")]
    NotZeroOne { index: usize, value: i64 },

    #[error("duplicate vertex in vertex set")]
    DuplicateVertex,

    #[error("vertex is not a member of the vertex set")]
    NotAMember,

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("budget exceeded: {required} units required, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("zero vector is not allowed in a vector configuration")]
    ZeroVector,

    #[error("conditioning event is empty for k = {k}, m = {m}")]
    EmptyConditioning { k: usize, m: usize },

    #[error("tau table mismatch: {0}")]
    TableMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

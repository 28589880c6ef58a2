use thiserror::Error;

use crate::matrix::Field;

/// Errors raised by the library.
///
/// Verification outcomes (deviations, failed validity checks) are reported in
/// report structs rather than as errors; this enum covers malformed input and
/// violated preconditions.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("factor dimensions must all be positive, got {0:?}")]
    InvalidShape(Vec<usize>),

    #[error("matrix is {rows}x{cols} but the factor shapes imply {expected_rows}x{expected_cols}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },

    #[error("operand fields differ: {left} vs {right}")]
    FieldMismatch { left: Field, right: Field },

    #[error("permutation has {got} entries but the operator has {expected} factors")]
    PermutationLength { got: usize, expected: usize },

    #[error("not a permutation: {0:?}")]
    NotBijective(Vec<usize>),

    #[error("factor index {index} out of range for {count} factors")]
    FactorIndex { index: usize, count: usize },

    #[error("operator has no tensor factors")]
    EmptyOperator,

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("operator is not square")]
    NotSquare,

    #[error("side length {0} exceeds the cap of {cap}", cap = crate::matrix::MAX_SIDE)]
    TooLarge(usize),

    #[error("expected {expected} factors, found {found}")]
    FactorCount { expected: usize, found: usize },

    #[error("fold metadata inconsistent with shape: {0}")]
    FoldMismatch(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("invalid protocol: {0}")]
    Protocol(String),

    #[error("shape chain broken at step {step}: {detail}")]
    ShapeChain { step: usize, detail: String },

    #[error("embedded object failed validation: {0}")]
    EmbeddingValidation(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

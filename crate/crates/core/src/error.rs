use thiserror::Error;

use crate::model::ValidationReport;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("dimension set is empty")]
    EmptyDimensions,
    #[error("dimension label at index {index} is blank")]
    BlankDimension { index: usize },
    #[error("duplicate dimension label {0:?}")]
    DuplicateDimension(String),
    #[error("{what}: expected length {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{what} at index {index} is {value}, outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        index: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("{what} at index {index} is not finite ({value})")]
    NonFinite {
        what: &'static str,
        index: usize,
        value: f64,
    },
    #[error("case has no actions")]
    EmptyActions,
    #[error("not a permutation of the action indices")]
    InvalidPermutation,
    #[error("subjective weight w must lie in [0, 1], got {0}")]
    InvalidWeight(f64),
    #[error("sigmoid scale must be finite and > 0, got {0}")]
    InvalidSigmoidScale(f64),
    #[error("invalid case: {}", .0.violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidCase(ValidationReport),
    #[error("unknown {kind} {value:?} (expected one of: {expected})")]
    UnknownName {
        kind: &'static str,
        value: String,
        expected: &'static str,
    },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("sequences differ in length ({predicted} vs {reference})")]
    LengthMismatch { predicted: usize, reference: usize },
    #[error("sequences must be non-empty")]
    EmptySequence,
    #[error("duplicate element {0:?} in {1} sequence")]
    DuplicateElement(String, &'static str),
    #[error("sequences are not permutations of the same element set")]
    ElementSetMismatch,
    #[error("no ranking pairs given")]
    EmptyPairs,
    #[error("score matrices differ in shape ({predicted_rows}x{predicted_cols} vs {gold_rows}x{gold_cols})")]
    ShapeMismatch {
        predicted_rows: usize,
        predicted_cols: usize,
        gold_rows: usize,
        gold_cols: usize,
    },
    #[error("score matrix is empty")]
    EmptyMatrix,
    #[error("threshold must be > 0, got {0}")]
    InvalidThreshold(f64),
}

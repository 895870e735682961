use thiserror::Error;

use crate::tutor::{FieldId, ProblemType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TutorError {
    #[error("field {0} is hidden")]
    HiddenField(FieldId),
    #[error("field {0} is already locked")]
    LockedField(FieldId),
    #[error("value type does not match field {0}")]
    ValueType(FieldId),
    #[error("problem is already finished")]
    ProblemFinished,
    #[error("fraction operands must be positive, got {num}/{den}")]
    NonPositiveOperand { num: i64, den: i64 },
    #[error("denominators violate the {0:?} constraint")]
    DenominatorConstraint(ProblemType),
    #[error("malformed problem text {0:?}")]
    MalformedProblem(String),
    #[error("unknown field name {0:?}")]
    UnknownField(String),
}

/// Transaction-log ingestion failures. Row numbers are 1-based data rows
/// (the header is not counted).
#[derive(Debug, Error)]
pub enum LogError {
    #[error("missing or unexpected header: expected {expected:?}")]
    Header { expected: String },
    #[error("row {row}: {source}")]
    Problem { row: usize, source: TutorError },
    #[error("row {row}: unknown outcome {value:?}")]
    Outcome { row: usize, value: String },
    #[error("row {row}: bad attempt index {value:?}")]
    AttemptIndex { row: usize, value: String },
    #[error("row {row}: attempt index {got} does not follow {previous} for field {field}")]
    NonMonotoneAttempt { row: usize, field: FieldId, previous: u32, got: u32 },
    #[error("row {row}: field {field} is not shown for problem {problem}")]
    FieldNotShown { row: usize, field: FieldId, problem: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TuneError {
    #[error("log has {available} problems but {requested} were requested")]
    NotEnoughProblems { requested: usize, available: usize },
    #[error("evaluation window {start}..{end} is empty")]
    EmptyWindow { start: usize, end: usize },
    #[error("at least one iteration is required")]
    NoIterations,
    #[error("at least one replication is required")]
    NoReplications,
}

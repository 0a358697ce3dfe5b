use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("unknown stitch token {token:?} at line {line}, column {col}")]
    UnknownToken { token: String, line: usize, col: usize },
    #[error("ragged rows: line {line} has {got} stitches, expected {expected}")]
    RaggedRows { line: usize, expected: usize, got: usize },
    #[error("pattern file contains no stitches")]
    EmptyFile,
    #[error("stitch row {row} out of range for a pattern with {rows} rows")]
    IndexOutOfRange { row: usize, rows: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PopulationError {
    #[error("no writer rule matches the cell at ({i}, {j}): {reason}")]
    PopulationConflict { i: usize, j: usize, reason: &'static str },
    #[error("transfer from ({i}, {j}) by {shift} CN columns leaves the grid")]
    TransferOutOfBounds { i: usize, j: usize, shift: i32 },
    #[error("no pulled-up cell below ({i}, {j}) to extend")]
    NoPositiveDeltaJBelow { i: usize, j: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("movement chain starting at ({i}, {j}) does not settle")]
    EvaluationDiverged { i: usize, j: usize },
    #[error("path entry ({i}, {j}) sits on an empty cell with no resident CN")]
    InconsistentPath { i: usize, j: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RenderError {
    #[error("render style needs positive sizes, got {0}")]
    DegenerateStyle(&'static str),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Population(#[from] PopulationError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Render(#[from] RenderError),
}

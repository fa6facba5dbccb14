use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {reason}")]
    Parse { line: usize, column: usize, reason: String },

    #[error("{axis} index {index} out of range (limit {limit})")]
    OutOfRange { axis: &'static str, index: usize, limit: usize },

    #[error("{axis} indices do not form a permutation")]
    NotAPermutation { axis: &'static str },

    #[error("no cells")]
    NoCells,

    #[error("cell ({row}, {col}) is not set")]
    CellNotSet { row: usize, col: usize },

    #[error("subboard is not a block")]
    NotABlock,

    #[error("inclusion index {j} out of range 0..={max}")]
    InclusionIndex { j: usize, max: usize },

    #[error("too large for exhaustive strategy ({cells} cells, limit {limit})")]
    TooLargeForExhaustive { cells: usize, limit: usize },

    #[error("board too large for oracle")]
    OracleGuard,

    #[error("unknown strategy {0:?}")]
    UnknownStrategy(String),

    #[error("cache integrity: conflicting polynomial stored for an equivalent board")]
    CacheConflict,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

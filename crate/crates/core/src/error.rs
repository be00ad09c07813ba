use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("run count {runs} is not divisible by level count {levels}")]
    NotDivisible { runs: usize, levels: usize },

    #[error("column {column} is not balanced: level {level} appears {count} times, expected {expected}")]
    Unbalanced {
        column: usize,
        level: u32,
        count: usize,
        expected: usize,
    },

    #[error("combined balance infeasible: column {column} already holds level {level} {count} times (limit {limit})")]
    BalanceInfeasible {
        column: usize,
        level: u32,
        count: usize,
        limit: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("value {value} at row {row}, column {column} is outside [0, 1]")]
    OutOfUnitCube { row: usize, column: usize, value: f64 },

    #[error("level {level} at row {row}, column {column} is outside 1..={levels}")]
    LevelOutOfRange {
        row: usize,
        column: usize,
        level: u32,
        levels: usize,
    },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("empty design")]
    EmptyDesign,

    #[error("search space error: {0}")]
    Space(String),

    #[error("unknown benchmark function '{0}'")]
    UnknownBenchmark(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("objective protocol error: {0}")]
    Objective(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

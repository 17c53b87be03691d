use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty dataset")]
    EmptyDataset,

    #[error("arity mismatch: expected {expected} intervals, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("malformed interval [{lo}, {hi}]: lower endpoint exceeds upper endpoint")]
    MalformedInterval { lo: f64, hi: f64 },

    #[error("value {value} is not on the grid of attribute `{attribute}`")]
    OffGrid { attribute: String, value: f64 },

    #[error("non-finite value in attribute `{attribute}`")]
    NonFinite { attribute: String },

    #[error("duplicate object id `{0}`")]
    DuplicateObject(String),

    #[error("no intent: the empty extent is the virtual bottom")]
    NoIntent,

    #[error("no neighbors of bottom: the extent is empty")]
    NoNeighborsOfBottom,

    #[error("oracle cap exceeded: {size} objects, cap is {cap}")]
    OracleCapExceeded { size: usize, cap: usize },

    #[error("capacity exceeded at step {step}: {size} patterns, capacity is {capacity}")]
    CapacityExceeded { step: usize, size: usize, capacity: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty after cleaning")]
    EmptyAfterCleaning,

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse { row: usize, column: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

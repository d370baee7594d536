use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("rank {rank} out of range for basis of size {size}")]
    RankOutOfRange { rank: u64, size: u64 },
    #[error("cell index {index} out of bounds for array of {n_cells} cells")]
    IndexOutOfBounds { index: usize, n_cells: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("array of {n_cells} cells exceeds the dense quantum cap of {cap} cells")]
    TooLarge { n_cells: usize, cap: usize },
    #[error("gate dimension {gate} does not match {mode} mode")]
    DimensionMismatch { gate: usize, mode: &'static str },
    #[error("gate is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("gate creates superposition and cannot run on the classical path")]
    NonClassicalGate,
    #[error("pulse {index}: {source}")]
    AtPulse {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("operation requires {0} mode")]
    WrongMode(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid layout: {0}")]
    Layout(String),
    #[error("malformed coded state at cell {cell}")]
    Malformed { cell: usize },
    #[error("no library sequence for {0}")]
    MissingEntry(String),
    #[error("library sequence failed its classical check on this layout: {0}")]
    LayoutCheck(String),
    #[error("golden data corrupt: {0}")]
    Golden(String),
    #[error("array too short: {0}")]
    TooShort(String),
    #[error("needs {needed}, over the budget of {budget}")]
    ExceedsBudget { needed: usize, budget: usize },
    #[error("invalid predicate: {0}")]
    Predicate(String),
    #[error("interaction sum diverges for exponent k = {0}")]
    Divergent(f64),
    #[error("invalid interaction model: {0}")]
    Model(String),
}

impl Error {
    pub(crate) fn at_pulse(index: usize, err: Error) -> Error {
        Error::AtPulse {
            index,
            source: Box::new(err),
        }
    }
}

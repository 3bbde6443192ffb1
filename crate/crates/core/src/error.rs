use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {}", .0.join("; "))]
    InvalidModel(Vec<String>),

    #[error("enumeration too large: {required} entries requested, budget is {budget}")]
    EnumerationTooLarge { required: f64, budget: usize },

    #[error("horizon must be at least {min}, got {got}")]
    HorizonTooSmall { min: usize, got: usize },

    #[error("law mismatch: {0}")]
    LawMismatch(String),

    #[error("component {component} is not recurrent from the start symbol")]
    NonRecurrentComponent { component: usize },

    #[error("chain has transient states {0:?}")]
    TransientStates(Vec<usize>),

    #[error("restricted chain is not irreducible and closed")]
    Reducible,

    #[error("singular linear system (pivot {0:e})")]
    Singular(f64),

    #[error("no mixture structure detected: {0}; use recovery::lln_recover for general inputs")]
    StructureNotDetected(String),

    #[error("start symbol is not in the first cell")]
    StartNotInFirstCell,

    #[error("trajectory too short: need at least {min} symbols, got {got}")]
    TrajectoryTooShort { min: usize, got: usize },

    #[error("symbol {0:?} is not covered by the partition")]
    SymbolOutsidePartition(String),

    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),

    #[error("row {row} has {count} visits, at least {min} required")]
    InsufficientVisits { row: String, count: usize, min: usize },

    #[error("row too short for testing: {len} < {min}")]
    RowTooShort { len: usize, min: usize },

    #[error("no row of the successors array has at least {min} entries")]
    NoTestableRows { min: usize },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("target set is empty over the reachable pairs")]
    EmptyTarget,

    #[error(
        "stopping times realized within horizon {horizon} with probability {reached:.6} < floor {floor}; \
         use Monte Carlo mode"
    )]
    Truncation { horizon: usize, reached: f64, floor: f64 },

    #[error("at least {min} samples required, got {got}")]
    TooFewSamples { min: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

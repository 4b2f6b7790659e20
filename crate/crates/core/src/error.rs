use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("length mismatch: expected {expected} bits, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("variable index {index} out of range for {num_vars} variables")]
    IndexOutOfRange { index: usize, num_vars: usize },

    #[error("term of degree {0} exceeds the supported maximum of 3")]
    DegreeTooHigh(usize),

    #[error("polynomial has cubic terms; quadratize it before building a QUBO")]
    RequiresQuadratization,

    #[error("{num_vars} variables is too many for exhaustive enumeration (limit {limit}); use simulated annealing")]
    TooManyVariables { num_vars: usize, limit: usize },

    #[error("adaptive update needs two previous iterates for variable {0}")]
    MissingHistory(usize),

    #[error("missing encoding: {0}")]
    MissingEncoding(String),

    #[error("invalid rod model: {0}")]
    InvalidRod(String),

    #[error("no prescribed force node; the rod is statically indeterminate")]
    NoTractionNode,

    #[error("expected a {expected} field")]
    WrongFieldKind { expected: &'static str },

    #[error("reference field has zero H1 norm")]
    ZeroNormReference,

    #[error("chamber length became non-positive ({0})")]
    ChamberCollapse(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error("empty group: {0}")]
    EmptyGroup(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error at {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    /// Whether the error stems from bad input configuration rather than a
    /// failure during execution.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}

use thiserror::Error;

/// Errors raised while reading, validating or processing datasets and layouts.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed dataset: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("duplicate node id `{0}`")]
    DuplicateId(String),
    #[error("multiple roots: `{0}` and `{1}`")]
    MultipleRoots(String, String),
    #[error("no root node")]
    NoRoot,
    #[error("node `{node}` references unknown parent `{parent}`")]
    UnknownParent { node: String, parent: String },
    #[error("node `{0}` is not reachable from the root (cycle)")]
    Cycle(String),
    #[error("weight sequence length mismatch for `{id}`: expected {expected}, got {got}")]
    LengthMismatch {
        id: String,
        expected: usize,
        got: usize,
    },
    #[error("negative or non-finite weight {value} for `{id}` at t={t}")]
    NegativeWeight { id: String, t: usize, value: f64 },
    #[error("internal node `{0}` carries weights")]
    InternalWeights(String),
    #[error("leaf `{0}` has no weights")]
    MissingWeights(String),
    #[error("total weight is zero at t={0}")]
    ZeroTotal(usize),
    #[error("num_timesteps must be positive")]
    NoTimesteps,
    #[error("timestep {t} out of range (dataset has {len})")]
    TimestepOutOfRange { t: usize, len: usize },
    #[error("invalid rectangle {0}")]
    InvalidRect(String),
    #[error("degenerate layout: {0}")]
    Degenerate(String),
    #[error("layouts cover different leaf sets")]
    LeafMismatch,
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error("invalid layout request: {0}")]
    InvalidRequest(String),
    #[error("area realization did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("could not generate a dataset of class {0} after {1} attempts")]
    UnreachableClass(String, usize),
    #[error("invalid class label `{0}`")]
    InvalidClass(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

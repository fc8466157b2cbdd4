use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by graph construction, file formats, task sampling,
/// feature extraction, model training, and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("record {record}: node id {id} out of range (num_nodes = {num_nodes})")]
    IdOutOfRange {
        record: usize,
        id: usize,
        num_nodes: usize,
    },
    #[error("node id {id} out of range (num_nodes = {num_nodes})")]
    NodeOutOfRange { id: usize, num_nodes: usize },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("requested {requested} pairs but only {eligible} eligible pairs exist")]
    InsufficientPairs { requested: usize, eligible: usize },
    #[error("requested {requested} positive pairs but only {available} are available")]
    InsufficientPositives { requested: usize, available: usize },
    #[error("AUC is undefined on single-class input")]
    SingleClass,
    #[error("non-finite score at index {0}")]
    NonFiniteScore(usize),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("power-law tail too small: need at least {needed} samples >= k_min, got {got}")]
    TailTooSmall { needed: usize, got: usize },
    #[error("training diverged: non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

use thiserror::Error;

/// Errors raised anywhere in the synthesis and simulation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("graph: {0}")]
    Graph(String),

    #[error("matrix is not symmetric: entry ({row}, {col}) = {upper} but ({col}, {row}) = {lower}")]
    Asymmetric {
        row: usize,
        col: usize,
        upper: f64,
        lower: f64,
    },

    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("penalty weight must be positive, got {0}")]
    NonPositivePenalty(f64),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("{n} variables exceeds the brute-force limit of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("invalid processor: {0}")]
    Processor(String),

    #[error("no embedding exists: {0}")]
    EmbeddingImpossible(String),

    #[error("embedding search exhausted its budget of {0} node expansions")]
    EmbeddingBudget(u64),

    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),

    #[error("schedule: {0}")]
    Schedule(String),

    #[error("program: {0}")]
    Program(String),

    #[error("time {t} outside [0, {final_time}]")]
    TimeOutOfRange { t: f64, final_time: f64 },

    #[error("simulation options: {0}")]
    Options(String),

    #[error("eigensolver: {0}")]
    Eigen(String),

    #[error("analysis: {0}")]
    Analysis(String),

    #[error("store: {0}")]
    Store(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

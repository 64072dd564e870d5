use thiserror::Error;

pub type Result<T, E = AppError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: variable {var} occurs twice in one clause")]
    DuplicateLiteral { line: usize, var: usize },
    #[error("L = {l} exceeds 2^k/(ek) for k = {k}")]
    CriterionViolated { k: usize, l: usize },
    #[error("block size {b} is below 4 * {delta}")]
    SubcriticalBlockSize { b: usize, delta: usize },
    #[error("{0}")]
    OutOfRange(String),
    #[error("no avoiding transversal after {0} restarts")]
    RestartsExhausted(usize),
    #[error("a color occurs {delta} times, above the limit {limit}")]
    SupercriticalColors { delta: usize, limit: f64 },
    #[error("no positive root for beta = {beta}, q = {q}")]
    NoRoot { beta: f64, q: f64 },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error(transparent)]
    Core(#[from] lllforge_core::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

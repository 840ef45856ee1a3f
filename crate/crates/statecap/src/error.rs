use thiserror::Error;

/// Errors produced by constructors, solvers, and the spec-file parser.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("negative probability at index {index}: {value}")]
    NegativeEntry { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, outside of tolerance around 1")]
    NotNormalized { sum: f64 },
    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("state {state} has zero probability; merge zero-probability states first")]
    ZeroStateProbability { state: usize },
    #[error("strategy enumeration would need {needed} mappings, cap is {cap}")]
    EnumerationCap { needed: u128, cap: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("solver did not converge within {max_iter} iterations (gap {gap:.3e})")]
    NonConvergence { max_iter: usize, gap: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("internal consistency violation: {0}")]
    Inconsistency(String),
    #[error("root bracketing failed: {0}")]
    Bracketing(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("partition {index} sums to {found}, expected {expected}")]
    OrderMismatch {
        index: usize,
        found: u64,
        expected: u64,
    },
    #[error("partitions have unequal sums ({0} vs {1})")]
    UnequalSums(u64, u64),
    #[error("misaligned tuples: {0}")]
    Misaligned(String),
    #[error("coefficients do not form a tuple of partitions: {0}")]
    NotATuple(String),
    #[error("reflection vector has norm {0}, expected 2")]
    NotRealNormalized(i64),
    #[error("reduction not well-defined at j={j}: m[{j},{ell}] = {part} < d = {d}")]
    WellDefinedness {
        j: usize,
        ell: usize,
        part: i64,
        d: i64,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("trace condition violated: sum of m*lambda = {0}")]
    TraceCondition(String),
    #[error("matrix has an eigenvalue that is not rational")]
    IrrationalEigenvalue,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("middle convolution assumption fails: {0}")]
    McAssumption(String),
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
    #[error("gamma factor {0} hits a pole")]
    Pole(String),
    #[error("series did not converge: {0}")]
    NonConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot:.3e} below tolerance)")]
    NotPositiveDefinite { pivot: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not symmetric: |m[{i}][{j}] - m[{j}][{i}]| = {gap:.3e}")]
    NotSymmetric { i: usize, j: usize, gap: f64 },

    #[error("residual variance of variable {index} is {variance:.3e}; it is fully explained by the conditioning set")]
    DegenerateResidual { index: usize, variance: f64 },

    #[error("target residual variance is {variance:.3e}; the target is fully explained by the conditioning set")]
    DegenerateTarget { variance: f64 },

    #[error("sample column {column} has zero variance after {attempts} attempts")]
    DegenerateSample { column: usize, attempts: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("ground set of size {n} exceeds the enumeration limit {limit}")]
    GroundSetTooLarge { n: usize, limit: usize },

    #[error("set of size {size} exceeds the enumeration limit {limit}")]
    SetTooLarge { size: usize, limit: usize },

    #[error("element {0} is already in the set")]
    ElementInSet(usize),

    #[error("element {element} out of range for ground set of size {n}")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("set {0:?} is not independent, cannot be completed to a base")]
    InfeasibleCompletion(Vec<usize>),

    #[error("no exchange bijection: {0}")]
    NoBijection(String),

    #[error("phi = {0} outside the supported range [1e-3, 100]")]
    InvalidPhi(f64),

    #[error("local search did not terminate within {0} iterations")]
    NonTermination(usize),

    #[error("instance parse error: {0}")]
    Parse(String),
}

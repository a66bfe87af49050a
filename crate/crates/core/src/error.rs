use thiserror::Error;

/// Every failure the library reports. Numeric payloads are carried as `f64`
/// regardless of the scalar type so the error stays non-generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("empty interval list")]
    EmptyInput,
    #[error("interval {index} is empty: beta = {beta} <= alpha = {alpha}")]
    EmptyInterval { index: usize, alpha: f64, beta: f64 },
    #[error("intervals overlap: ({a0}, {b0}) and ({a1}, {b1})")]
    OverlappingIntervals { a0: f64, b0: f64, a1: f64, b1: f64 },
    #[error("period must be positive, got {0}")]
    NonpositivePeriod(f64),
    #[error("point {0} lies within tolerance of the boundary")]
    BoundaryPoint(f64),
    #[error("measure {0} is not 1")]
    UnnormalizedMeasure(f64),
    #[error("beta_{index} = {beta} is not congruent to its partner alpha = {alpha} modulo 1/{p}")]
    CongruenceViolated { index: usize, beta: f64, alpha: f64, p: f64 },
    #[error("cycles could not be placed disjointly")]
    CycleOverlap,
    #[error("interval {index}: {count} intervals have alpha congruent to beta (need exactly one)")]
    NoUniquePartner { index: usize, count: usize },
    #[error("not a spectrum: {0}")]
    NotASpectrum(String),
    #[error("input matrix is not unitary (defect {0:e})")]
    NonUnitaryInput(f64),
    #[error("factor matrix is numerically singular (condition {0:e})")]
    SingularFactor(f64),
    #[error("M_alpha is numerically singular (condition {0:e})")]
    SingularMalpha(f64),
    #[error("root count {found} disagrees with winding number {expected} on [{a}, {b})")]
    WindingMismatch { found: i64, expected: i64, a: f64, b: f64 },
    #[error("{0} is not an eigenvalue")]
    NotAnEigenvalue(f64),
    #[error("function has zero norm")]
    ZeroFunction,
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("set is not aligned to the lattice (1/{0})Z")]
    NotLatticeAligned(f64),
    #[error("set is not a {0}-tile")]
    NotPTile(usize),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("operation not available for this case: {0}")]
    WrongCase(String),
    #[error("inconsistency between closed form and generic engine: {0}")]
    InconsistencyDetected(String),
    #[error("point {0} lies outside the closure of the set")]
    PointOutsideClosure(f64),
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, SpectraError>;

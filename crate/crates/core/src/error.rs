use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("asymmetry {diff:e} at ({row}, {col}) exceeds tolerance")]
    AsymmetryExceedsTolerance { row: usize, col: usize, diff: f64 },
    #[error("negative weight {value} at ({row}, {col})")]
    NegativeWeight { row: usize, col: usize, value: f64 },
    #[error("nonzero diagonal entry {value} at ({index}, {index})")]
    NonZeroDiagonal { index: usize, value: f64 },
    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("size must be at least 1")]
    ZeroSize,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("index {index} out of range for size {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("vector is not on the simplex: {0}")]
    NotOnSimplex(String),
    #[error("zero payoff denominator x'Ax")]
    ZeroDenominator,
    #[error("vertex set is empty")]
    EmptySet,
    #[error("vertex {index} is not a member of the set")]
    NotMember { index: usize },
    #[error("set is not dominant")]
    NotDominant,
    #[error("affinity matrix has no positive entry")]
    AllZeroMatrix,
    #[error("size {size} exceeds limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("solution support misses the constraint set (alpha = {alpha})")]
    ConstraintUnsatisfied { alpha: f64 },
    #[error("vertex {index} belongs to no cluster")]
    UnassignedVertex { index: usize },
    #[error("need at least 2 samples, found {found}")]
    TooFewSamples { found: usize },
    #[error("covariance matrix is singular after regularization")]
    SingularAfterRegularization,
    #[error("kernel is not normalized: K[{index}][{index}] = {value}")]
    NonNormalizedKernel { index: usize, value: f64 },
    #[error("vertex {vertex} appears in more than one prior cluster")]
    OverlappingPriors { vertex: usize },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("kernel width is zero (all points identical)")]
    DegenerateSigma,
    #[error("neighbor list is empty")]
    EmptyList,
    #[error("need at least 2 neighbors, found {found}")]
    TooFewNeighbors { found: usize },
    #[error("tracklet has no descriptors")]
    EmptyTracklet,
    #[error("group {group} has no members")]
    EmptyGroup { group: usize },
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}

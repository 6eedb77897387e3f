use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    SpecInvalid(String),
    #[error("weight system for block {block} has no positive solution")]
    NoPositiveSolution { block: usize },
    #[error("weight system for block {block} has a {dim}-dimensional solution space")]
    AmbiguousWeights { block: usize, dim: usize },
    #[error("supplied weights for block {block} do not satisfy quasihomogeneity")]
    WeightsMismatch { block: usize },
    #[error("no permutation brings the transposed matrix into complete-intersection shape: {0}")]
    NoValidShape(String),
    #[error("no block correspondence satisfying the size condition is an involution")]
    NoInvolutiveNu,
    #[error("no permutation rho exists for the {side} data")]
    NoRho { side: &'static str },
    #[error("form {index} matches no coefficient pattern: {reason}")]
    ClassificationFailure { index: usize, reason: String },
    #[error("special solution violated at row {index}")]
    LemmaShapeViolation { index: usize },
    #[error("xi values are not proportional to the transposed weights at row {row}")]
    NotFactorizable { row: usize },
    #[error("key identity fails for transposed block {q}")]
    IdentityViolated { q: usize },
    #[error("series expansion impossible: {0}")]
    NotExpandable(String),
    #[error("operator expansion exceeds degree cap {cap}")]
    DegreeCapExceeded { cap: usize },
    #[error("dual partition system is unsolvable: {0}")]
    Unsolvable(String),
    #[error("family parameter m = {0} is below 3")]
    InvalidFamilyParameter(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

use alloc::string::String;

/// Errors raised by the kernel and the valuation toolkit.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("polytope of dimension {dim} is not full-dimensional in R^{ambient}")]
    NotFullDimensional { dim: usize, ambient: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("singular design matrix")]
    SingularSystem,
    #[error("ill-conditioned fit grid: {0}")]
    IllConditioned(String),
    #[error("cone is not pointed")]
    NotPointed,
    #[error("cone is not full-dimensional")]
    ConeNotFullDimensional,
    #[error("non-generic incidence between ray and cone")]
    NonGeneric,
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("cannot parse rational: {0}")]
    Parse(String),
    #[error("valuation is not even")]
    OddValuation,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

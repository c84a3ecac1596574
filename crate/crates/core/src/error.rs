use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("finite-difference stencil leaves the domain on axis {axis}")]
    StencilOutOfDomain { axis: usize },
    #[error("derivative order {order:?} not supported")]
    OrderUnsupported { order: Vec<usize> },
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("eta construction failed: {0}")]
    Eta(String),
    #[error("weight is singular at s = {0}")]
    WeightSingular(f64),
    #[error("weight evaluation overflowed at the requested point")]
    WeightOverflow,
    #[error("dimension {dim} unsupported by {what}")]
    DimensionUnsupported { dim: usize, what: &'static str },
    #[error("unknown identity id `{0}`")]
    UnknownIdentity(String),
    #[error("boundary condition violated: {0}")]
    BoundaryViolation(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("root finder failed: {0}")]
    RootFinder(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

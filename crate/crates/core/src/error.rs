use thiserror::Error;

/// Errors raised by the multislice library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid composition: {0}")]
    InvalidComposition(String),

    #[error("enumeration budget exceeded: {cardinality} vertices, budget {budget}")]
    BudgetExceeded { cardinality: String, budget: u64 },

    #[error("dense cap exceeded: dimension {dimension}, cap {cap}")]
    DenseCapExceeded { dimension: usize, cap: usize },

    #[error("position {position} out of range for N = {n}")]
    PositionOutOfRange { position: usize, n: usize },

    #[error("level {level} out of range for r = {r}")]
    LevelOutOfRange { level: usize, r: usize },

    #[error("transposition needs two distinct positions, got {0} twice")]
    SamePosition(usize),

    #[error("vertex does not realize the composition")]
    VertexMismatch,

    #[error("index {index} out of range for {cardinality} vertices")]
    IndexOutOfRange { index: u64, cardinality: u64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("composition {0} is trivial (single vertex)")]
    TrivialComposition(String),

    #[error("operation requires N >= {required}, found N = {found}")]
    TooFewParticles { required: usize, found: usize },

    #[error("level {level} has zero occupancy")]
    EmptyLevel { level: usize },

    #[error("level function {index} is not in the K-space")]
    NotInKspace { index: usize },

    #[error("function is identically zero")]
    ZeroFunction,

    #[error("observable has zero variance")]
    DegenerateObservable,

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("invalid coarsening map: {0}")]
    InvalidCoarsening(String),

    #[error("invalid walk configuration: {0}")]
    InvalidWalkConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable code, used in CLI envelopes and exit reporting.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidComposition(_) => "E_COMPOSITION",
            Error::BudgetExceeded { .. } => "E_BUDGET",
            Error::DenseCapExceeded { .. } => "E_DENSE_CAP",
            Error::PositionOutOfRange { .. } => "E_POSITION",
            Error::LevelOutOfRange { .. } => "E_LEVEL",
            Error::SamePosition(_) => "E_POSITION",
            Error::VertexMismatch => "E_VERTEX",
            Error::IndexOutOfRange { .. } => "E_INDEX",
            Error::DimensionMismatch { .. } => "E_DIMENSION",
            Error::TrivialComposition(_) => "E_TRIVIAL",
            Error::TooFewParticles { .. } => "E_TOO_FEW_PARTICLES",
            Error::EmptyLevel { .. } => "E_EMPTY_LEVEL",
            Error::NotInKspace { .. } => "E_NOT_IN_KSPACE",
            Error::ZeroFunction => "E_ZERO_FUNCTION",
            Error::DegenerateObservable => "E_DEGENERATE_OBSERVABLE",
            Error::NotSymmetric => "E_NOT_SYMMETRIC",
            Error::InvalidCoarsening(_) => "E_COARSENING",
            Error::InvalidWalkConfig(_) => "E_WALK_CONFIG",
            Error::Parse(_) => "E_PARSE",
            Error::Io(_) => "E_IO",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

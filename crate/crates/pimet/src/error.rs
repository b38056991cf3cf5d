use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid complex: {0}")]
    InvalidComplex(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("ambiguous geodesic between {0} and {1}: uniqueness window violated")]
    AmbiguousGeodesic(String, String),

    #[error("mesh {mesh} is not below the straightening margin {margin}")]
    MarginViolation { mesh: String, margin: String },

    #[error("operands live on different spaces")]
    SpaceMismatch,

    #[error("non-simplicial map: {0}")]
    NonSimplicial(String),

    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("invalid cover: {0}")]
    InvalidCover(String),

    #[error("star refinement failed after {0} subdivision rounds")]
    RefinementFailure(usize),

    #[error("invalid inverse system: {0}")]
    InvalidSystem(String),

    #[error("incompatible thread: {0}")]
    IncompatibleThread(String),

    #[error("incompatible input: {0}")]
    Incompatible(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("negative value {0} in multiset")]
    NegativeValue(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unknown generator symbol {0:?}")]
    UnknownGenerator(char),

    #[error("ball exceeds resource cap of {cap} elements")]
    ResourceCap { cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("function support leaves the embedding domain: {0}")]
    DomainExceeded(String),

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("radius {radius} not below certificate residual radius {residual}")]
    RadiusTooLarge { radius: usize, residual: usize },

    #[error("inverted sandwich: lower {lower} > upper {upper}")]
    InvertedSandwich { lower: f64, upper: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("no schedule exists: {0}")]
    NoSchedule(String),

    #[error("slice depth {have} insufficient, need {need}")]
    DepthInsufficient { have: usize, need: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

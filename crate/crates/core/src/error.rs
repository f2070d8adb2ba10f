use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field contains a non-finite value at sample {index}")]
    NonFinite { index: usize },

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("band k = {k} outside resolvable range [{min}, {max}] for this grid")]
    BandOutOfRange { k: i32, min: i32, max: i32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("geometry violation: {0}")]
    Geometry(String),

    #[error("aliasing guard: {0}")]
    Aliasing(String),

    #[error("non-negligible mean ({mean:e}) for a negative-order operator")]
    NonZeroMean { mean: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Context { context: String, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Wraps the error with a description of where it happened.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context { context: context.into(), source: Box::new(self) }
    }
}

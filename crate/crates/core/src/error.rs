use thiserror::Error;

/// Errors raised by the toolkit.
///
/// The variants split into configuration problems (bad arguments, unsupported
/// setups) and numeric failures (factorizations, embeddings). The CLI maps
/// the two groups to different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("capacity exceeded: {requested} > {cap} ({what})")]
    Capacity {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("circulant embedding not nonnegative-definite (min normalized eigenvalue {min_eigenvalue:e} at padding {padding}x)")]
    EmbeddingNotNonnegative { min_eigenvalue: f64, padding: usize },

    #[error("covariance not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("tessellation construction failed: {0}")]
    Construction(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerical machinery itself, as opposed to
    /// problems with the inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::EmbeddingNotNonnegative { .. } | Error::NotPositiveDefinite(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors produced anywhere in the estimation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid user-facing configuration (shape parameters, ε, R, sample counts).
    #[error("configuration error: {0}")]
    Config(String),

    /// A grid does not cover the region it is required to cover.
    #[error("grid does not cover the required domain: {0}")]
    DomainCoverage(String),

    /// Broken invariants of a complex or diagram, or mismatched grid geometries.
    #[error("structural error: {0}")]
    Structural(String),

    /// Exact baselines exist only for convex shapes.
    #[error("no closed-form baseline for non-convex shape kind `{0}`")]
    UnsupportedBaseline(String),

    /// The brute-force rank oracle refuses large inputs.
    #[error("oracle input has {cells} cells, above the limit of {limit}")]
    OracleScope { cells: usize, limit: usize },

    /// Bad arguments to a numeric routine.
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for errors caused by the caller's input rather than by the pipeline itself.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::DomainCoverage(_)
                | Error::UnsupportedBaseline(_)
                | Error::OracleScope { .. }
                | Error::Argument(_)
        )
    }
}

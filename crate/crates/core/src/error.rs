use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed specification: {0}")]
    MalformedSpec(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("neighbor layer of `{0}` is not materialized")]
    NotMaterialized(String),

    #[error("materialization budget exceeded: {needed} vertices requested, cap is {cap}")]
    ResourceCap { needed: u128, cap: usize },

    #[error("empty domain")]
    EmptyDomain,

    #[error("function vanishes identically")]
    ZeroFunction,

    #[error("argument out of domain: {0}")]
    OutOfDomain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error("exhaustion sequence is not monotone: {0}")]
    NonMonotone(String),

    #[error("assumption violated: {0}")]
    Assumption(String),
}

impl Error {
    /// Configuration-class errors (bad input rather than numerical trouble).
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::MalformedSpec(_)
                | Error::InvalidParameter(_)
                | Error::Io { .. }
                | Error::Json(_)
                | Error::UnknownVertex(_)
        )
    }
}

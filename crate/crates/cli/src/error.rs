use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Engine(#[from] qcanon_core::Error),
    #[error("invalid argument: {0}")]
    Usage(String),
    #[error("cache: {0}")]
    Cache(String),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

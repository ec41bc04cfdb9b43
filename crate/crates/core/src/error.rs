use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("internal consistency violation: {0}")]
    Internal(String),
    #[error("invalid partition: {0}")]
    Partition(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("analysis failed: {0}")]
    Analysis(String),
    #[error("schema version mismatch: expected {expected}, found {found}")]
    Schema { expected: u32, found: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Partition(_) | Error::Dimension(_) | Error::Schema { .. } => 2,
            Error::Index(_) => 2,
            Error::Analysis(_) => 3,
            Error::Capacity(_) => 4,
            Error::Internal(_) | Error::Io(_) | Error::Json(_) => 1,
        }
    }
}

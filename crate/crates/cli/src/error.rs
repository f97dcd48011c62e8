use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid value for {flag}: {message}")]
    InvalidFlag { flag: &'static str, message: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Library(#[from] resm::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for bad input, 3 for numerical failure, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::InvalidFlag { .. } => 2,
            CliError::Numerical(_) | CliError::Library(_) => 3,
            CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 1,
        }
    }
}

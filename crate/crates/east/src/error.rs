use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] east_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for bad input, 1 for everything that went wrong while running.
    pub fn exit_code(&self) -> i32 {
        use east_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Model(
                E::OutOfRange { .. }
                | E::EmptyInterval { .. }
                | E::SiteOutsideWindow { .. }
                | E::UnsupportedSize { .. }
                | E::SizeMismatch { .. }
                | E::Precondition(_)
                | E::Refused(_),
            ) => 2,
            _ => 1,
        }
    }
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] carleman_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for anything the user can fix in the configuration, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use carleman_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Json(_) => 2,
            CliError::Core(
                E::Config(_) | E::UnknownIdentity(_) | E::InvalidDomain(_) | E::InvalidGrid(_) | E::LengthMismatch { .. },
            ) => 2,
            _ => 1,
        }
    }
}

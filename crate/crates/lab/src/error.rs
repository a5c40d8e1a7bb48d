use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot parse configuration: {0}")]
    Parse(#[from] toml::de::Error),
    #[error(transparent)]
    Core(#[from] nsf_core::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Configuration problems detected before any work is done.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            LabError::Config(_)
                | LabError::Parse(_)
                | LabError::Core(nsf_core::Error::InvalidConfig(_))
                | LabError::Core(nsf_core::Error::InvalidGrid(_))
                | LabError::Core(nsf_core::Error::InvalidTimes(_))
                | LabError::Core(nsf_core::Error::InvalidExponent(_))
        )
    }
}

pub type Result<T> = std::result::Result<T, LabError>;

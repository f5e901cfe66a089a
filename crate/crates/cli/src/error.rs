use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// The configuration is malformed; `location` is a JSON path.
    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl CliError {
    pub fn config(location: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config {
            location: location.into(),
            message: message.into(),
        }
    }
}

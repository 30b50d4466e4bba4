use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed configuration at '{path}': {message}")]
    Parse { path: String, message: String },

    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] bunchlab_core::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to write output: {0}")]
    Output(String),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> u8 {
        2
    }
}

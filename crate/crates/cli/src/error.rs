/// Failures of a CLI invocation; usage problems exit 2, domain problems 3.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("syntax error at column {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Core(#[from] steenrod_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    ModelFile { path: String, source: serde_json::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Syntax { .. } | CliError::Usage(_) => 2,
            _ => 3,
        }
    }
}

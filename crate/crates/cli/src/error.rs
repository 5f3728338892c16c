use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("unknown catalog key {0:?}; run `rough-hj catalog` for the list")]
    UnknownKey(String),
    #[error(transparent)]
    Module(#[from] rough_hj::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit code: 2 for usage and config problems, 3 for module refusals, 4 for i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Config(_) | Self::UnknownKey(_) => 2,
            Self::Module(_) => 3,
            Self::Io(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Usage(_) => "usage",
            Self::Config(_) => "config",
            Self::UnknownKey(_) => "unknown-key",
            Self::Module(_) => "refusal",
            Self::Io(_) => "io",
        }
    }

    /// One-line JSON diagnostic for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.kind(), "message": self.to_string(), "exit": self.exit_code() }).to_string()
    }
}

use thiserror::Error;

/// Errors produced anywhere in the selection pipeline.
#[derive(Debug, Error)]
pub enum NvsdError {
    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("degenerate response: {0}")]
    DegenerateResponse(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("smoother fit failed: {0}")]
    Fit(String),

    #[error("no variables selected")]
    EmptySelection,

    #[error("schema error: {0}")]
    Schema(String),

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("ingest error: {0}")]
    Ingest(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl NvsdError {
    /// Stable machine-readable tag used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            NvsdError::InvalidSample(_) => "invalid_sample",
            NvsdError::DegenerateResponse(_) => "degenerate_response",
            NvsdError::DegenerateInput(_) => "degenerate_input",
            NvsdError::Config(_) => "config",
            NvsdError::Fit(_) => "fit",
            NvsdError::EmptySelection => "empty_selection",
            NvsdError::Schema(_) => "schema",
            NvsdError::Decomposition(_) => "decomposition",
            NvsdError::Parse(_) => "parse",
            NvsdError::Ingest(_) => "ingest",
            NvsdError::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, NvsdError>;

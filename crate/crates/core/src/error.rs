use thiserror::Error;

/// Errors raised by the workbench.
#[derive(Debug, Error)]
pub enum TmaError {
    /// A scenario violates one of its structural invariants.
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    /// Geometry that has no defined bearing (observer collocated with target).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    /// No bit width satisfies the quantization inequality for the span.
    #[error("no bit width satisfies 2^(m-1) < {scaled} < 2^m - 1")]
    BitWidth { scaled: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown preset `{0}` (expected trial01..trial12)")]
    UnknownPreset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("failed to parse TOML: {0}")]
    TomlDe(#[from] toml::de::Error),

    #[error("failed to serialize TOML: {0}")]
    TomlSer(#[from] toml::ser::Error),
}

pub type Result<T> = std::result::Result<T, TmaError>;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid tree text at token {index} (`{token}`): {reason}")]
    TreeParse {
        index: usize,
        token: String,
        reason: &'static str,
    },

    #[error("tree must contain at least one leaf")]
    EmptyTree,

    #[error("literal x{var} is outside the variable range 1..={n}")]
    LiteralOutOfRange { var: u32, n: u32 },

    #[error("position {pos} is out of range for a tree of size {size}")]
    PositionOutOfRange { pos: usize, size: usize },

    /// A configuration value failed validation; `key` names the offending field.
    #[error("invalid value for `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient samples: collected {collected} of {requested} matching states")]
    InsufficientSamples { collected: usize, requested: usize },

    #[error("chain `{chain}` violates its declared conditions: {reason}")]
    ChainCondition { chain: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

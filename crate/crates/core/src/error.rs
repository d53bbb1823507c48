use thiserror::Error;

/// Every fallible operation in the crate reports through this type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point} is outside the domain of {context}")]
    DomainMismatch { point: String, context: String },

    #[error("sample is empty")]
    EmptySample,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("enumeration budget exceeded: {required} required, budget {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("branch prefix of length {available} does not reach level {needed}")]
    InsufficientPrefix { needed: usize, available: usize },

    #[error("float precision exhausted below depth {max_depth}")]
    PrecisionExhausted { max_depth: usize },

    #[error("insufficient depth at step u={u}, v={v}, j={j}: {reason}")]
    InsufficientDepth {
        u: String,
        v: String,
        j: usize,
        reason: String,
    },

    #[error("sample of size {got} is too small, need at least {needed}")]
    InsufficientSample { needed: usize, got: usize },

    #[error("inner product {0:e} falls inside the sign-rejection band")]
    AmbiguousSign(f64),

    #[error("inconsistent: {0}")]
    Inconsistent(String),

    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("out-of-range output index {index} at input {input} (relation has {count} outputs)")]
    OutOfRangeOutput {
        input: String,
        index: usize,
        count: usize,
    },

    #[error("cap exceeded: {what} is {value}, limit {limit}{}", if *.large_available { " (use --allow-large to raise it)" } else { "" })]
    CapExceeded {
        what: &'static str,
        value: u128,
        limit: u128,
        large_available: bool,
    },

    #[error("invalid epsilon {0}: need 0 <= eps < 1")]
    InvalidEpsilon(String),

    #[error("partition invariant violated: {0}")]
    PartitionInvariant(String),

    #[error("index mismatch: {0}")]
    IndexMismatch(String),

    #[error("side mismatch: expected {expected}, found {found}")]
    SideMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("synthesized tree has depth {depth}, over its budget of {budget}")]
    BudgetExceeded { depth: usize, budget: usize },

    #[error("malformed tree: {0}")]
    MalformedTree(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("truncation dropped all probability mass")]
    AllMassDropped,

    #[error("{0}")]
    Unsupported(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::Malformed(msg.into())
    }
}

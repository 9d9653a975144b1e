use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Out-of-range index, shape mismatch or other malformed argument.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("exhaustive domain needs {required} runs, budget is {budget} (raise the budget explicitly)")]
    Budget { required: u128, budget: u64 },

    /// A protocol rule read an input that is not part of its party's view.
    #[error("legality violation: party {party} read x[{instance},{input}], which it cannot see")]
    Legality {
        party: usize,
        instance: usize,
        input: usize,
    },

    #[error("model violation: {0}")]
    Model(String),

    #[error("nondeterminism detected: {0}")]
    Determinism(String),

    #[error("obliviousness violation on input {input}: {detail}")]
    Obliviousness { input: String, detail: String },

    #[error("certificate rejected: {0}")]
    Certificate(String),

    #[error("pattern-robustness check failed: {0}")]
    Robustness(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("prefix-freeness violated: {0}")]
    PrefixFree(String),

    /// A demultiplexing step needed a value its party cannot know. Never
    /// raised for compilations backed by a valid certificate.
    #[error("soundness violation: {0}")]
    Soundness(String),

    #[error("internal invariant broken: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

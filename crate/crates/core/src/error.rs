use thiserror::Error;

/// Errors surfaced by schemes, bridges, circuits and the harness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("space tag mismatch: expected `{expected}`, found `{found}`")]
    TagMismatch { expected: String, found: String },
    #[error("value is not an element of space `{0}`")]
    NotInSpace(String),
    #[error("plaintext space of `{0}` is empty")]
    EmptyPlaintextSpace(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("circuit outside the evaluable class: {0}")]
    CircuitOutOfClass(String),
    #[error("space `{0}` is not enumerable")]
    NonEnumerableSpace(String),
    #[error("scheme mismatch: `{left}` is not `{right}`")]
    SchemeMismatch { left: String, right: String },
    #[error("{q} does not divide {big_q}")]
    DivisibilityViolation { q: u64, big_q: u64 },
    #[error("secret key bit length {0} is odd")]
    OddKeyLength(usize),
    #[error("bridges do not share a key bundle: {0}")]
    KeyBundleMismatch(String),
    #[error("wrong key mode: {0}")]
    WrongKeyMode(String),
    #[error("invalid message pair: {0}")]
    InvalidMessagePair(String),
    #[error("samplers disagree on shape: {0}")]
    ShapeMismatch(String),
    #[error("only one half of the secret key is present")]
    MissingKeyHalf,
    #[error("malformed value: {0}")]
    Malformed(String),
    #[error("unknown {kind} `{id}`")]
    Unknown { kind: &'static str, id: String },
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn malformed(what: impl Into<String>) -> Error {
    Error::Malformed(what.into())
}

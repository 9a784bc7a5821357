use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for a {qubits}-qubit register")]
    QubitIndex { index: usize, qubits: usize },

    #[error("bell measurement needs two distinct qubits, got {0} twice")]
    SameQubit(usize),

    #[error("unsupported register: {0}")]
    Register(String),

    #[error("gate word must contain at least one bit")]
    EmptyGateWord,

    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("not a bijection on 0..{0}")]
    NotPermutation(usize),

    #[error("need at least {min} nodes, got {n}")]
    TooFewNodes { n: usize, min: usize },

    #[error("edge density must lie strictly between 0 and 1, got {0}")]
    InvalidDensity(f64),

    #[error("invalid digest parameters: {0}")]
    DigestParams(String),

    #[error("shared pair pool exhausted: need {needed}, {available} left")]
    PoolExhausted { needed: usize, available: usize },

    #[error("pool misaligned: expected {expected} pairs, pool holds {actual}")]
    PoolMisaligned { expected: usize, actual: usize },

    #[error("round alignment mismatch: {challenges} challenges vs {tuples} tuples")]
    Alignment { challenges: usize, tuples: usize },

    #[error("eve supplied {available} qubits, round {round} needs one more")]
    QubitsExhausted { round: usize, available: usize },

    #[error("secret must contain at least one bit")]
    EmptySecret,

    #[error("invalid chunking: {0}")]
    Chunking(String),

    #[error("invalid adversary model: {0}")]
    AdversaryModel(String),

    #[error("invalid config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

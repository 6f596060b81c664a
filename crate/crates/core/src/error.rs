use thiserror::Error;

/// Errors raised by the encoding, simulation and optimization layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("instance with {nodes} nodes exceeds the subtour enumeration budget of {limit} nodes")]
    SubtourBudget { nodes: usize, limit: usize },

    #[error("{size} variables exceed the enumeration limit of {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("bitstring has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid bitstring {0:?}: only '0' and '1' are allowed")]
    InvalidBitstring(String),

    #[error("unsupported constraint: {0}")]
    UnsupportedConstraint(String),

    #[error("qubit index {index} out of range for {qubits} qubits")]
    QubitOutOfRange { index: usize, qubits: usize },

    #[error("two-qubit gate needs distinct qubits, got {0} twice")]
    QubitClash(usize),

    #[error("depolarizing parameter {value} outside [0, {max}] for {qubits} qubit(s)")]
    NoiseOutOfRange { value: f64, max: f64, qubits: usize },

    #[error("invalid noise model: {0}")]
    InvalidNoise(String),

    #[error("constraint component over qubits {0:?} has no admissible assignment")]
    InfeasibleStructure(Vec<usize>),

    #[error("invalid ansatz: {0}")]
    InvalidAnsatz(String),

    #[error("expected {expected} parameters, got {got}")]
    ParameterLength { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty histogram")]
    EmptyHistogram,

    #[error("need at least {need} runs for statistics, got {got}")]
    TooFewRuns { need: usize, got: usize },

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

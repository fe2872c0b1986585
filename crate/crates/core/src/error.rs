use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} qubits, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid Pauli string {text:?}: {reason}")]
    PauliParse { text: String, reason: String },

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("schedule does not match the code generators: {0}")]
    ScheduleMismatch(String),

    #[error("circuit is not invertible: instruction {index} ({gate}) is not unitary")]
    NotInvertible { index: usize, gate: String },

    #[error("encoder synthesis failed: {0}")]
    EncoderSynthesis(String),

    #[error("fault-tolerance violation: {0}")]
    FaultTolerance(String),

    #[error("fault at instruction {0} does not reference a noise site")]
    InvalidFaultSite(usize),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("line {line}: {message}")]
    Definition { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

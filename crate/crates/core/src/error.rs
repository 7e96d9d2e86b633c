use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sequence needs at least 2 spins, got {0}")]
    SequenceTooShort(usize),
    #[error("spin values must be +1 or -1, got {0}")]
    InvalidSpin(i64),
    #[error("lag {k} out of range 1..={max}")]
    LagOutOfRange { k: usize, max: usize },
    #[error("LABS problems need n >= 2, got {0}")]
    ProblemTooSmall(usize),
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("duplicate qubit index {0}")]
    DuplicateQubit(usize),
    #[error("bitstring length {got} does not match {expected} qubits")]
    LengthMismatch { expected: usize, got: usize },
    #[error("{n_qubits} qubits exceeds the cap of {cap}")]
    TooManyQubits { n_qubits: usize, cap: usize },
    #[error("archive line {line}: {reason}")]
    ArchiveParse { line: usize, reason: String },
    #[error("archive has duplicate entries for n = {0}")]
    ArchiveDuplicate(usize),
    #[error("fit needs {needed} points, got {got}")]
    NotEnoughPoints { needed: usize, got: usize },
    #[error("degenerate fit input: {0}")]
    DegenerateFit(String),
    #[error("register size {0} outside 1..=20")]
    RegisterSize(usize),
    #[error("scale l must be finite and positive, got {0}")]
    InvalidScale(f64),
    #[error("register value {p} out of range for {n_register} register qubits")]
    RegisterValue { p: usize, n_register: usize },
    #[error("initial state norm is {0}, expected 1")]
    Unnormalized(f64),
    #[error("ground set is empty")]
    EmptyGroundSet,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("post-selected branch has probability {0:e}")]
    ZeroBranch(f64),
    #[error("angle list length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("unsupported Taylor order {0}")]
    UnsupportedOrder(usize),
    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

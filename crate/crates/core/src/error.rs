use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right} qubits")]
    Dimension { left: usize, right: usize },

    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("CNOT control and target are both qubit {0}")]
    SameQubit(usize),

    #[error("a register needs at least one qubit")]
    EmptyRegister,

    #[error("rowsum phase sum was {0} mod 4; rows must commute")]
    PhaseIntegrity(u8),

    #[error("invalid tableau: {0}")]
    InvalidTableau(String),

    #[error("matrix is singular over GF(2)")]
    Singular,

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("{0}")]
    InvalidInput(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("numerical integrity: {0}")]
    Numerical(String),

    #[error("engine mismatch: {0}")]
    EngineMismatch(String),

    #[error("snapshot: {0}")]
    Snapshot(String),
}

impl Error {
    pub(crate) fn check_qubit(qubit: usize, n: usize) -> Result<()> {
        if qubit < n {
            Ok(())
        } else {
            Err(Error::QubitOutOfRange { qubit, n })
        }
    }

    pub(crate) fn check_dims(left: usize, right: usize) -> Result<()> {
        if left == right {
            Ok(())
        } else {
            Err(Error::Dimension { left, right })
        }
    }
}

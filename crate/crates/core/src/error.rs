use thiserror::Error;

/// Errors raised across the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{qubits} qubits exceeds the configured cap of {cap}")]
    QubitCap { qubits: usize, cap: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid projector: {0}")]
    InvalidProjector(String),

    #[error("invalid qubit selection: {0}")]
    Qubits(String),

    #[error("{0}")]
    Basis(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("{line}:{column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("invalid circuit: {0}")]
    Circuit(String),

    #[error("fixed-point solver did not converge (residual {residual:.3e})")]
    NoConvergence { residual: f64 },

    #[error("null projection: the interaction fails to occur")]
    NullProjection,

    #[error("no consistent description: {0}")]
    Inconsistent(String),

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

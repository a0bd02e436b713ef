use thiserror::Error;

/// Errors raised by the operator algebra, process model and statistics engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },
    #[error("matrix is not square: row {row} has {len} entries, expected {dim}")]
    NotSquare { row: usize, len: usize, dim: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is not positive semi-definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("state trace {trace} is outside the admissible range")]
    BadTrace { trace: f64 },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("duplicate outcome label '{0}'")]
    DuplicateOutcome(String),
    #[error("unknown outcome '{label}' at time {time}")]
    UnknownOutcome { time: usize, label: String },
    #[error("time {time} is outside 1..={n}")]
    InvalidTime { time: usize, n: usize },
    #[error("time {time} is not measured in this distribution")]
    TimeNotMeasured { time: usize },
    #[error("invalid outcome sequence: {0}")]
    InvalidSequence(String),
    #[error("process has {instruments} instruments but {dynamics} dynamical maps (need exactly one fewer)")]
    LengthMismatch { instruments: usize, dynamics: usize },
    #[error("basis is not orthonormal (defect {defect:e})")]
    NotOrthonormal { defect: f64 },
    #[error("instrument at time {time} is not rank-1 projective in the fixed basis: {reason}")]
    NotFixedBasisProjective { time: usize, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn mismatch(context: impl Into<String>, expected: usize, found: usize) -> Error {
    Error::DimensionMismatch {
        context: context.into(),
        expected,
        found,
    }
}

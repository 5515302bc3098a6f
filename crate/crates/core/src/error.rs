use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    ConvergenceFailure { sweeps: usize, off_norm: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite entry at index {0}")]
    NonFinite(usize),
    #[error("unknown factor label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate factor label `{0}`")]
    DuplicateLabel(String),
    #[error("factor `{0}` must have positive dimension")]
    ZeroDimension(String),
    #[error("unit mismatch: `{0}` vs `{1}`")]
    UnitMismatch(String, String),
    #[error("state is not normalized: norm {0:.3e}")]
    NotNormalized(f64),
    #[error("norm drift {0:.3e} after unitary evolution")]
    NormDrift(f64),
    #[error("matrix is not unitary: defect {0:.3e}")]
    NotUnitary(f64),
    #[error("expectation value has imaginary part {0:.3e}")]
    NonRealExpectation(f64),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("truncation inadequate: {0}")]
    TruncationInadequate(String),
    #[error("conserving completion impossible: {0}")]
    OverflowUnrepresentable(String),
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by state construction, operator assembly, and solvers.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count {0} out of range (expected {1}..={2})")]
    QubitCountOutOfRange(usize, usize, usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("state vector norm {0} differs from 1 beyond tolerance")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix has trace {0}, expected 1")]
    BadTrace(f64),

    #[error("matrix has an eigenvalue below -1e-10; not positive semidefinite")]
    NotPositiveSemidefinite,

    #[error("noise weight {0} outside [0, 1]")]
    BadNoiseWeight(f64),

    #[error("witness strength kappa = {0} outside [0, 1]")]
    BadKappa(f64),

    #[error("setting index {0} outside 1..={1}")]
    BadSettingIndex(usize, usize),

    #[error("expectation value has imaginary residue {0:.3e} beyond tolerance")]
    ImaginaryResidue(f64),

    #[error("enumeration size {0} exceeds cap {1}")]
    EnumerationTooLarge(u64, u64),

    #[error("optimizer failed to converge; best value so far {best}")]
    OptimizerNonConvergence { best: f64 },

    #[error("behavior table is not a valid no-signalling behavior: {0}")]
    BadBehavior(String),

    #[error("LP solver stalled (anti-cycling guard exceeded after {0} pivots)")]
    SolverStall(u64),

    #[error("LP verdict failed post-verification: {0}")]
    UnverifiedVerdict(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("serialization: {0}")]
    Serialization(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

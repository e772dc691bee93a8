use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum SpinNetError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("eigensolver did not converge: best residual {residual:.3e} after {iters} iterations")]
    NoConvergence { residual: f64, iters: usize },

    #[error("lattice validation failed:\n{0}")]
    LatticeInvalid(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration:\n{0}")]
    ConfigInvalid(String),

    #[error("optimization aborted: {0}")]
    OptimizerAbort(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SpinNetError>;

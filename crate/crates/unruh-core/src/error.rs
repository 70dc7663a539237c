//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or applying channels,
/// validating states, or running property suites.
#[derive(Error, Debug)]
pub enum Error {
    /// A matrix or signature did not have the shape an operation required.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    /// Generic invalid-argument error carrying a human-readable reason.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A matrix failed the Hermiticity tolerance.
    #[error("matrix is not Hermitian: max asymmetry {defect:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },

    /// A matrix failed the positive-semidefiniteness tolerance.
    #[error("matrix is not positive semidefinite: min eigenvalue {min_eig:.3e}")]
    NotPositive { min_eig: f64 },

    /// A density matrix trace disagreed with its recorded target.
    #[error("trace {trace:.12e} differs from target {target:.12e} beyond tolerance")]
    TraceMismatch { trace: f64, target: f64 },

    /// The acceleration parameter diverges (Omega <= 0 means r -> infinity).
    #[error("acceleration diverges: omega = {omega} requires infinite squeezing")]
    DivergentAcceleration { omega: f64 },

    /// A requested construction would exceed a configured resource budget.
    #[error("{what} needs {needed}, exceeding the budget of {budget}")]
    BudgetExceeded {
        what: String,
        needed: usize,
        budget: usize,
    },

    /// Operation defined only for specific dimensions (e.g. qubit robustness).
    #[error("unsupported dimension {dim} for {operation}")]
    UnsupportedDimension { dim: usize, operation: String },

    /// An assertable property suite failed (used by the CLI for exit codes).
    #[error("property failed: {0}")]
    PropertyFailed(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

//! Error type shared by all simulator modules.

use thiserror::Error;

/// Errors produced by state construction, channel application and metrics.
#[derive(Debug, Error)]
pub enum SimError {
    /// A Fock index lies outside the truncated basis.
    #[error("index ({n_a}, {n_b}) outside truncated basis with n_max = {n_max}")]
    IndexOutOfRange {
        n_a: usize,
        n_b: usize,
        n_max: usize,
    },

    /// Matrix or vector dimensions do not match the expected shape.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Two objects carry different truncation configurations.
    #[error("truncation mismatch: n_max {left} vs n_max {right}")]
    TruncationMismatch { left: usize, right: usize },

    /// A constructed state leaves too much probability outside the basis.
    #[error(
        "tail bound violated: probability {deficit:.3e} outside the truncated \
         basis exceeds tolerance {tolerance:.3e} (n_max = {n_max})"
    )]
    TailBound {
        deficit: f64,
        tolerance: f64,
        n_max: usize,
    },

    /// A parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A matrix expected to be Hermitian is not.
    #[error("matrix not Hermitian: max |A - A^†| element = {max_dev:.3e}")]
    NotHermitian { max_dev: f64 },

    /// A density matrix trace deviates from one beyond tolerance.
    #[error("trace deviates from one by {deviation:.3e}")]
    TraceNotOne { deviation: f64 },

    /// A matrix expected to be positive semidefinite has a significantly
    /// negative eigenvalue. Signals an upstream bug rather than roundoff.
    #[error("matrix not positive semidefinite: min eigenvalue = {min_eigenvalue:.3e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    /// A projective filter removed (essentially) all probability mass.
    #[error("filter annihilates state: success probability {probability:.3e}")]
    FilterAnnihilatesState { probability: f64 },

    /// The dense eigensolver failed to converge.
    #[error("eigendecomposition failed: {0}")]
    EigenFailure(String),
}

pub type Result<T> = std::result::Result<T, SimError>;

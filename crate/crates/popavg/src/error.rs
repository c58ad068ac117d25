//! Error types shared across the toolkit.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameter or configuration value.
    #[error("configuration error: {0}")]
    Config(String),

    /// A correlation kernel cannot be realized as a positive semidefinite
    /// covariance; carries the offending spectral quantity.
    #[error("kernel infeasible: {0}")]
    KernelInfeasible(String),

    /// Non-finite state encountered while stepping a population.
    #[error("integration error: non-finite state at replicate {replicate}, time {time}, subsystem {index}")]
    Integration {
        replicate: usize,
        time: usize,
        index: usize,
    },

    /// Query radius outside the sampled window.
    #[error("radius {radius} outside window of radius {window}")]
    OutOfWindow { radius: f64, window: f64 },

    /// Estimator refused because too few replicates were supplied.
    #[error("{context}: needs at least {needed} replicates, got {got}")]
    InsufficientReplicates {
        context: &'static str,
        needed: usize,
        got: usize,
    },

    /// Ball conditioning found too few in-ball samples.
    #[error("insufficient conditioning mass: {in_ball} samples in ball, need {needed}")]
    InsufficientConditioningMass { in_ball: usize, needed: usize },

    /// Spatial averaging window contained no subsystems.
    #[error("empty averaging window at radius {0}")]
    EmptyWindow(f64),

    /// Grids passed to an estimator do not line up.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Requested operation is not defined for the given input.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

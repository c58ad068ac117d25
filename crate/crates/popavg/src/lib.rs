//! Simulation and statistical verification toolkit for spatially averaged
//! populations of coupled nonlinear stochastic subsystems.
//!
//! The crate builds heterogeneous populations of discrete-time subsystems
//! `x_i(t+1) = f_i(x_{N_i}(t), w_i(t))`, generates noise fields with
//! prescribed correlation decay, and measures the macroscopic consequences:
//! residual-factor growth of partial-sum variances, central limit behavior
//! of normalized averages, Poisson spatial density, and the emergence of
//! linear dynamics for the averaged state as the population grows.
//!
//! Module map:
//! - [`stochastic`]: correlated sequence/field generators (moving average,
//!   inverse-lag, long-memory, exponential-distance kernels).
//! - [`model`]: population construction and trajectory simulation.
//! - [`spatial`]: Poisson point layouts, ball counts, neighborhoods.
//! - [`mixing`]: correlation-decay profiles and residual-factor estimation.
//! - [`averaging`]: normalized population averages, gaussianity tests,
//!   limit covariance estimation.
//! - [`linearity`]: covariance-ratio linear fits, ball-conditioned means,
//!   nonlinearity gap, convergence-rate and LTI diagnostics.
//!
//! All randomness flows from explicit seeds through a documented splitting
//! function ([`seed`]); replicate-level work is data-parallel when the
//! `parallel` feature (default) is enabled and bit-identical to the
//! sequential fallback.

pub mod averaging;
pub mod error;
pub mod exec;
pub mod io;
pub mod linearity;
pub mod mixing;
pub mod model;
pub mod seed;
pub mod spatial;
pub mod stats;
pub mod stochastic;

pub use error::{Error, Result};

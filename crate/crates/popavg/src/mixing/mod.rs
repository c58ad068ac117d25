//! Empirical mixing diagnostics: correlation-decay profiles, residual
//! factor estimation, slowly-varying tests, and the closed-form growth-law
//! catalog.

mod profile;
mod residual;

pub use profile::{estimate_corr_decay, CorrDecayOptions, CorrEstimator, MixingProfile};
pub use residual::{
    analytic_residual_factor, classify_growth, estimate_residual_curve, shifted_sum_ratio_monitor,
    slowly_varying_test, GrowthFit, ResidualCurve, ResidualLaw, SlowlyVarying,
    SlowlyVaryingReport,
};

//! Microscopic dynamics families.
//!
//! Every catalog family maps a coupled input `u = g * (neighbor mean) + w`
//! through a bounded nonlinearity, so states are uniformly bounded after
//! one step. The saturation is a smooth odd sigmoid scaled to the bound
//! (not a hard clip) for the default family: it is analytic, globally
//! Lipschitz, and exact scalar oracles stay closed-form. `Linear` and
//! `ExpectationSchedule` are unbounded reference families used as ground
//! truth where the macroscopic dynamics are linear by construction.

/// Dynamics family of one subsystem.
#[derive(Debug, Clone, PartialEq)]
pub enum DynamicsFamily {
    /// `bound * tanh(u / bound)`: smooth saturated-linear dynamics.
    SaturatedLinear { gain: f64, bound: f64 },
    /// `clamp(u^degree, -bound, bound)`: polynomial with hard clip.
    ClippedPolynomial { gain: f64, degree: u32, bound: f64 },
    /// `bound * logistic(slope * (u - threshold))`: monotone bounded
    /// activation with a soft threshold.
    WilsonCowanLike { slope: f64, threshold: f64, bound: f64 },
    /// Exactly linear `gain * input + w`; unbounded, reference only.
    Linear { gain: f64 },
    /// `a(t) * input` with `a(t) = exp(2^t)`: the precomputable
    /// expectation-coefficient schedule. Noise is ignored; valid while
    /// `exp(2^t)` is representable (t <= 9).
    ExpectationSchedule,
}

impl DynamicsFamily {
    /// Uniform bound `M` on the family output, when one exists.
    pub fn bound(&self) -> Option<f64> {
        match self {
            DynamicsFamily::SaturatedLinear { bound, .. }
            | DynamicsFamily::ClippedPolynomial { bound, .. }
            | DynamicsFamily::WilsonCowanLike { bound, .. } => Some(*bound),
            DynamicsFamily::Linear { .. } | DynamicsFamily::ExpectationSchedule => None,
        }
    }

    /// Base gain parameter subject to heterogeneity jitter.
    pub fn base_gain(&self) -> f64 {
        match self {
            DynamicsFamily::SaturatedLinear { gain, .. } => *gain,
            DynamicsFamily::ClippedPolynomial { gain, .. } => *gain,
            DynamicsFamily::WilsonCowanLike { slope, .. } => *slope,
            DynamicsFamily::Linear { gain } => *gain,
            DynamicsFamily::ExpectationSchedule => 1.0,
        }
    }

    /// Time-varying gain of the expectation schedule, `exp(2^t)`.
    pub fn schedule_gain(t: usize) -> f64 {
        (2f64.powi(t as i32)).exp()
    }

    /// Apply the family at time `t` with per-subsystem parameters:
    /// `gain` is the jittered gain/slope, `threshold` the jittered
    /// threshold (unused outside the threshold family).
    pub fn apply(&self, t: usize, input: f64, noise: f64, gain: f64, threshold: f64) -> f64 {
        match self {
            DynamicsFamily::SaturatedLinear { bound, .. } => {
                let u = gain * input + noise;
                bound * (u / bound).tanh()
            }
            DynamicsFamily::ClippedPolynomial { degree, bound, .. } => {
                let u = gain * input + noise;
                u.powi(*degree as i32).clamp(-bound, *bound)
            }
            DynamicsFamily::WilsonCowanLike { bound, .. } => {
                let u = gain * input + noise;
                bound / (1.0 + (-(u - threshold)).exp())
            }
            DynamicsFamily::Linear { .. } => gain * input + noise,
            DynamicsFamily::ExpectationSchedule => Self::schedule_gain(t) * input,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match self {
            DynamicsFamily::SaturatedLinear { bound, .. }
            | DynamicsFamily::ClippedPolynomial { bound, .. }
            | DynamicsFamily::WilsonCowanLike { bound, .. } => {
                if !(*bound > 0.0) {
                    return Err(format!("bound must be positive, got {bound}"));
                }
            }
            _ => {}
        }
        if let DynamicsFamily::ClippedPolynomial { degree, .. } = self {
            if *degree == 0 {
                return Err("polynomial degree must be at least 1".into());
            }
        }
        Ok(())
    }
}

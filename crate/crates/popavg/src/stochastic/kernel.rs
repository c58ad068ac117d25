//! Noise kernels: prescribed correlation structures for generated fields.
//!
//! A kernel fixes the correlation `rho(n)` between entries at distance `n`
//! (index lag or Euclidean distance) together with a variance scale. The
//! catalog spans the full regime of residual-factor growth: summable
//! correlations (constant residual factor), the boundary `c/n` decay
//! (logarithmic growth), sub-logarithmic `1/log(1+n)` decay, and polynomial
//! long-memory decay realized by fractional Gaussian noise.

use crate::error::{Error, Result};

/// Correlation family of a [`NoiseKernel`].
#[derive(Debug, Clone, PartialEq)]
pub enum KernelKind {
    /// Independent entries.
    Iid,
    /// Finite moving average of i.i.d. innovations; correlations vanish
    /// beyond the window length.
    MovingAverage { weights: Vec<f64> },
    /// `rho(n) = c / n`. Admissible only for `c <= 1/(2 ln 2)`: the spectral
    /// density is `1 - 2 c ln(2 sin(w/2))`, minimized at `w = pi`.
    InverseLag { c: f64 },
    /// Fractional Gaussian noise with Hurst index `H in (0.5, 1)`;
    /// correlations decay like `n^{-p}` with `p = 2 - 2H`.
    LongMemory { hurst: f64 },
    /// `rho(n) = 1 / log(1 + n)`: slower than any polynomial decay.
    /// Realizability is only checked numerically at generation time.
    InverseLog,
    /// `rho(r) = exp(-r / length)`: exponential decay in index lag or
    /// Euclidean distance.
    ExpDistance { length: f64 },
}

/// A correlation kernel with its variance scale.
///
/// `variance` is the marginal variance of generated entries, except for
/// `MovingAverage`, where it is the innovation variance (the marginal is
/// then `variance * sum(weights^2)`).
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseKernel {
    kind: KernelKind,
    variance: f64,
}

/// Largest admissible `c` for the inverse-lag kernel: `1 / (2 ln 2)`.
pub const INVERSE_LAG_MAX_C: f64 = 0.721_347_520_444_481_7;

impl NoiseKernel {
    /// Validate and build a kernel. Inadmissible inverse-lag constants are
    /// rejected here, at configuration time, naming the negative spectral
    /// value; other parameter errors are configuration errors.
    pub fn new(kind: KernelKind, variance: f64) -> Result<Self> {
        if !(variance > 0.0) || !variance.is_finite() {
            return Err(Error::Config(format!(
                "kernel variance must be positive and finite, got {variance}"
            )));
        }
        match &kind {
            KernelKind::Iid => {}
            KernelKind::MovingAverage { weights } => {
                if weights.is_empty() {
                    return Err(Error::Config("moving-average weights must be nonempty".into()));
                }
                if weights.iter().any(|w| !w.is_finite()) {
                    return Err(Error::Config("moving-average weights must be finite".into()));
                }
                if weights.iter().all(|w| *w == 0.0) {
                    return Err(Error::Config("moving-average weights are all zero".into()));
                }
            }
            KernelKind::InverseLag { c } => {
                if !(*c > 0.0) || !c.is_finite() {
                    return Err(Error::Config(format!(
                        "inverse-lag constant must be positive, got {c}"
                    )));
                }
                let min_density = inverse_lag_spectral_min(*c);
                if min_density < 0.0 {
                    return Err(Error::KernelInfeasible(format!(
                        "inverse-lag c={c} exceeds 1/(2 ln 2) = {INVERSE_LAG_MAX_C:.6}; \
                         spectral density at w=pi is {min_density:.6} < 0"
                    )));
                }
            }
            KernelKind::LongMemory { hurst } => {
                if !(*hurst > 0.5 && *hurst < 1.0) {
                    return Err(Error::Config(format!(
                        "long-memory hurst must lie strictly in (0.5, 1), got {hurst}"
                    )));
                }
            }
            KernelKind::InverseLog => {}
            KernelKind::ExpDistance { length } => {
                if !(*length > 0.0) || !length.is_finite() {
                    return Err(Error::Config(format!(
                        "exp-distance length must be positive, got {length}"
                    )));
                }
            }
        }
        Ok(Self { kind, variance })
    }

    pub fn kind(&self) -> &KernelKind {
        &self.kind
    }

    /// Variance parameter as supplied (innovation variance for MA).
    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Marginal variance of generated entries.
    pub fn marginal_variance(&self) -> f64 {
        match &self.kind {
            KernelKind::MovingAverage { weights } => {
                self.variance * weights.iter().map(|w| w * w).sum::<f64>()
            }
            _ => self.variance,
        }
    }

    /// Prescribed correlation at distance `dist` (index lag or Euclidean
    /// distance, depending on how the kernel is used).
    pub fn correlation(&self, dist: f64) -> f64 {
        if dist <= 0.0 {
            return 1.0;
        }
        match &self.kind {
            KernelKind::Iid => 0.0,
            KernelKind::MovingAverage { weights } => {
                let n = dist.round() as usize;
                let s2: f64 = weights.iter().map(|w| w * w).sum();
                ma_autocovariance(weights, n) / s2
            }
            KernelKind::InverseLag { c } => c / dist,
            KernelKind::LongMemory { hurst } => fgn_autocovariance(*hurst, dist),
            KernelKind::InverseLog => 1.0 / (1.0 + dist).ln(),
            KernelKind::ExpDistance { length } => (-dist / length).exp(),
        }
    }

    /// Autocovariance at integer lag `n` (index-kernel form).
    pub fn autocovariance(&self, n: usize) -> f64 {
        if n == 0 {
            return self.marginal_variance();
        }
        self.marginal_variance() * self.correlation(n as f64)
    }

    /// First `len` autocovariances, `gamma(0..len)`.
    pub fn autocovariance_sequence(&self, len: usize) -> Vec<f64> {
        (0..len).map(|n| self.autocovariance(n)).collect()
    }
}

/// Autocovariance of a finite moving average with unit innovation variance:
/// `sum_k w_k w_{k+n}`.
pub fn ma_autocovariance(weights: &[f64], n: usize) -> f64 {
    if n >= weights.len() {
        return 0.0;
    }
    weights
        .iter()
        .zip(weights.iter().skip(n))
        .map(|(a, b)| a * b)
        .sum()
}

/// Unit-variance fractional Gaussian noise autocovariance
/// `0.5 (|n+1|^{2H} - 2 |n|^{2H} + |n-1|^{2H})`.
pub fn fgn_autocovariance(hurst: f64, n: f64) -> f64 {
    let h2 = 2.0 * hurst;
    let n = n.abs();
    0.5 * ((n + 1.0).powf(h2) - 2.0 * n.powf(h2) + (n - 1.0).abs().powf(h2))
}

/// Minimum of the inverse-lag spectral density over `(0, pi]`:
/// `1 - 2 c ln 2`, attained at `w = pi`.
pub fn inverse_lag_spectral_min(c: f64) -> f64 {
    1.0 - 2.0 * c * std::f64::consts::LN_2
}

/// Inverse-lag spectral density at angular frequency `w in (0, pi]`,
/// `1 - 2 c ln(2 sin(w/2))`, in units of the marginal variance.
pub fn inverse_lag_spectral_density(c: f64, w: f64) -> f64 {
    1.0 - 2.0 * c * (2.0 * (w / 2.0).sin()).ln()
}

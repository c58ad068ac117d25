//! Empirical correlation-decay profiles.
//!
//! The maximal correlation between sigma-algebras of past and future blocks
//! is not computable from samples; what is estimated here are documented
//! proxies. The default takes, at each distance, the pairwise Pearson
//! correlation of largest magnitude across index pairs (a lower bound on
//! the block supremum); `MeanPairwise` averages instead; `ProjectionProxy`
//! tightens the pairwise bound by maximizing over random one-dimensional
//! projections of left/right blocks.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::seed::rng_for;
use crate::stats;

/// Which proxy estimator produced a [`MixingProfile`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrEstimator {
    MaxPairwise,
    MeanPairwise,
    ProjectionProxy,
}

/// Empirical correlation-decay curve versus index lag.
#[derive(Debug, Clone)]
pub struct MixingProfile {
    pub distances: Vec<f64>,
    pub rho_hat: Vec<f64>,
    /// Per-bin confidence half-widths, `4 / sqrt(effective samples)`.
    pub half_width: Vec<f64>,
    pub estimator: CorrEstimator,
    pub warnings: Vec<String>,
}

impl MixingProfile {
    /// Export as CSV: `distance,rho_hat,half_width`.
    pub fn to_csv<P: AsRef<std::path::Path>>(&self, path: P) -> Result<()> {
        crate::io::write_csv(
            path,
            &["distance", "rho_hat", "half_width"],
            self.distances
                .iter()
                .zip(&self.rho_hat)
                .zip(&self.half_width)
                .map(|((d, r), h)| vec![*d, *r, *h]),
        )
    }
}

/// Options for [`estimate_corr_decay`].
#[derive(Debug, Clone)]
pub struct CorrDecayOptions {
    pub estimator: CorrEstimator,
    /// Allow a single-replicate input, estimated by windowed autocorrelation
    /// along the row instead of across replicates.
    pub ergodic_fallback: bool,
    /// Projections per side for the projection proxy.
    pub projections: usize,
    /// Block width for the projection proxy.
    pub block: usize,
    /// Seed for projection directions.
    pub seed: u64,
}

impl Default for CorrDecayOptions {
    fn default() -> Self {
        Self {
            estimator: CorrEstimator::MaxPairwise,
            ergodic_fallback: false,
            projections: 8,
            block: 8,
            seed: 0,
        }
    }
}

/// Estimate the correlation-decay profile of replicate rows at the given
/// index lags. Cross-replicate correlations need at least 2 rows (30+ for
/// useful output); a single row is accepted only with the ergodic fallback
/// declared. Constant (zero-variance) columns are excluded with a warning.
pub fn estimate_corr_decay(
    rows: &[Vec<f64>],
    lags: &[usize],
    opts: &CorrDecayOptions,
) -> Result<MixingProfile> {
    if rows.is_empty() {
        return Err(Error::InsufficientReplicates {
            context: "estimate_corr_decay",
            needed: 2,
            got: 0,
        });
    }
    let n = rows[0].len();
    if lags.iter().any(|&l| l >= n) {
        return Err(Error::GridMismatch(format!(
            "lag beyond row length {n}"
        )));
    }
    let mut sorted = lags.to_vec();
    sorted.sort_unstable();
    sorted.dedup();

    if rows.len() == 1 {
        if !opts.ergodic_fallback {
            return Err(Error::InsufficientReplicates {
                context: "estimate_corr_decay (declare ergodic_fallback for single rows)",
                needed: 2,
                got: 1,
            });
        }
        return ergodic_profile(&rows[0], &sorted, opts.estimator);
    }

    let reps = rows.len();
    let mut warnings = Vec::new();
    // Column variances, to skip degenerate columns once.
    let variances: Vec<f64> = (0..n)
        .map(|i| {
            let col: Vec<f64> = rows.iter().map(|r| r[i]).collect();
            stats::variance(&col)
        })
        .collect();
    for (i, v) in variances.iter().enumerate() {
        if *v <= 0.0 {
            warnings.push(format!("column {i} has zero variance; excluded"));
        }
    }

    let mut rho_hat = Vec::with_capacity(sorted.len());
    let mut half_width = Vec::with_capacity(sorted.len());
    for &lag in &sorted {
        let value = match opts.estimator {
            CorrEstimator::MaxPairwise | CorrEstimator::MeanPairwise => {
                let mut corrs = Vec::new();
                for i in 0..n - lag {
                    if variances[i] <= 0.0 || variances[i + lag] <= 0.0 {
                        continue;
                    }
                    let a: Vec<f64> = rows.iter().map(|r| r[i]).collect();
                    let b: Vec<f64> = rows.iter().map(|r| r[i + lag]).collect();
                    if let Some(c) = stats::pearson(&a, &b) {
                        corrs.push(c);
                    }
                }
                if corrs.is_empty() {
                    warnings.push(format!("no usable pairs at lag {lag}"));
                    0.0
                } else if opts.estimator == CorrEstimator::MaxPairwise {
                    // Signed value of largest magnitude.
                    corrs
                        .iter()
                        .cloned()
                        .max_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())
                        .unwrap()
                } else {
                    stats::mean(&corrs)
                }
            }
            CorrEstimator::ProjectionProxy => {
                projection_proxy(rows, lag, opts, &mut warnings)
            }
        };
        rho_hat.push(value);
        half_width.push(4.0 / (reps as f64).sqrt());
    }
    Ok(MixingProfile {
        distances: sorted.iter().map(|&l| l as f64).collect(),
        rho_hat,
        half_width,
        estimator: opts.estimator,
        warnings,
    })
}

/// Max correlation over random one-dimensional projections of a left block
/// ending at the split and a right block starting `lag` after it.
fn projection_proxy(
    rows: &[Vec<f64>],
    lag: usize,
    opts: &CorrDecayOptions,
    warnings: &mut Vec<String>,
) -> f64 {
    let n = rows[0].len();
    let mid = n / 2;
    let block = opts.block.min(mid).max(1);
    if mid + lag + block > n {
        warnings.push(format!("row too short for projection proxy at lag {lag}"));
        return 0.0;
    }
    let left: Vec<usize> = (mid - block..mid).collect();
    let right: Vec<usize> = (mid + lag..mid + lag + block).collect();
    let mut rng = rng_for(opts.seed, lag as u64);
    let mut best = 0.0f64;
    for _ in 0..opts.projections {
        let u = random_unit(&mut rng, block);
        let v = random_unit(&mut rng, block);
        let a: Vec<f64> = rows
            .iter()
            .map(|r| left.iter().zip(&u).map(|(&i, w)| r[i] * w).sum())
            .collect();
        let b: Vec<f64> = rows
            .iter()
            .map(|r| right.iter().zip(&v).map(|(&i, w)| r[i] * w).sum())
            .collect();
        if let Some(c) = stats::pearson(&a, &b) {
            if c.abs() > best.abs() {
                best = c;
            }
        }
    }
    best
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim)
            .map(|_| {
                use rand_distr::{Distribution, StandardNormal};
                StandardNormal.sample(rng)
            })
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.iter().map(|x| x / norm).collect();
        }
    }
}

fn ergodic_profile(
    row: &[f64],
    lags: &[usize],
    estimator: CorrEstimator,
) -> Result<MixingProfile> {
    let n = row.len();
    let mut rho_hat = Vec::new();
    let mut half_width = Vec::new();
    let mut warnings = vec!["single replicate: ergodic windowed autocorrelation".to_string()];
    for &lag in lags {
        let a = &row[..n - lag];
        let b = &row[lag..];
        match stats::pearson(a, b) {
            Some(c) => rho_hat.push(c),
            None => {
                warnings.push(format!("degenerate windows at lag {lag}"));
                rho_hat.push(0.0);
            }
        }
        half_width.push(4.0 / ((n - lag) as f64).sqrt());
    }
    Ok(MixingProfile {
        distances: lags.iter().map(|&l| l as f64).collect(),
        rho_hat,
        half_width,
        estimator,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::{gen_iid, gen_ma, IidDistribution};

    #[test]
    fn iid_profile_is_flat_zero() {
        let reps = 2000;
        let m = gen_iid(48, reps, IidDistribution::Gaussian, 1.0, 101).unwrap();
        let prof = estimate_corr_decay(
            m.rows(),
            &[1, 2, 4, 8],
            &CorrDecayOptions {
                estimator: CorrEstimator::MeanPairwise,
                ..Default::default()
            },
        )
        .unwrap();
        for (lag, r) in prof.distances.iter().zip(&prof.rho_hat) {
            assert!(
                r.abs() < 4.0 / (reps as f64).sqrt(),
                "lag {lag}: rho_hat {r}"
            );
        }
    }

    #[test]
    fn ma_profile_matches_identity() {
        // MA weights [1,1]: rho(1) = 0.5, rho(2) = 0.
        let reps = 3000;
        let m = gen_ma(40, reps, &[1.0, 1.0], 1.0, 103).unwrap();
        let prof = estimate_corr_decay(
            m.rows(),
            &[1, 2],
            &CorrDecayOptions {
                estimator: CorrEstimator::MeanPairwise,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((prof.rho_hat[0] - 0.5).abs() < 0.05, "rho(1) = {}", prof.rho_hat[0]);
        assert!(prof.rho_hat[1].abs() < 0.05, "rho(2) = {}", prof.rho_hat[1]);
    }

    #[test]
    fn constant_column_is_excluded_with_warning() {
        let mut rows: Vec<Vec<f64>> = gen_iid(8, 100, IidDistribution::Gaussian, 1.0, 107)
            .unwrap()
            .rows()
            .to_vec();
        for row in &mut rows {
            row[3] = 42.0;
        }
        let prof = estimate_corr_decay(&rows, &[1], &CorrDecayOptions::default()).unwrap();
        assert!(prof.warnings.iter().any(|w| w.contains("column 3")));
    }

    #[test]
    fn single_row_requires_declared_fallback() {
        let m = gen_ma(5000, 1, &[1.0, 1.0], 1.0, 109).unwrap();
        assert!(estimate_corr_decay(m.rows(), &[1], &CorrDecayOptions::default()).is_err());
        let prof = estimate_corr_decay(
            m.rows(),
            &[1, 2],
            &CorrDecayOptions {
                ergodic_fallback: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((prof.rho_hat[0] - 0.5).abs() < 0.05);
    }

    #[test]
    fn projection_proxy_detects_dependence() {
        let reps = 1500;
        let m = gen_ma(64, reps, &[1.0, 0.8, 0.6], 1.0, 113).unwrap();
        let proxy = estimate_corr_decay(
            m.rows(),
            &[1, 10],
            &CorrDecayOptions {
                estimator: CorrEstimator::ProjectionProxy,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(proxy.rho_hat[0].abs() > 0.2, "short-lag proxy {}", proxy.rho_hat[0]);
        assert!(proxy.rho_hat[1].abs() < 0.2, "long-lag proxy {}", proxy.rho_hat[1]);
    }
}

//! Sequence generators and the `SampleMatrix` container.
//!
//! All generators are pure functions of their parameters and a master seed:
//! replicate `r` draws from the sub-seeded stream `sub_seed(seed, r)`, so
//! rows are mutually independent and the full matrix is bit-identical
//! across reruns and across parallel/sequential execution.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::kernel::{KernelKind, NoiseKernel};
use super::sampler::FieldSampler;
use crate::error::{Error, Result};
use crate::exec;
use crate::seed::rng_for;
use crate::stats;

/// Replicate-by-index matrix of generated values.
#[derive(Debug, Clone)]
pub struct SampleMatrix {
    values: Vec<Vec<f64>>,
    n_items: usize,
    seed: u64,
    kernel: NoiseKernel,
}

impl SampleMatrix {
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r]
    }

    pub fn replicates(&self) -> usize {
        self.values.len()
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn kernel(&self) -> &NoiseKernel {
        &self.kernel
    }

    /// Column `i` across replicates.
    pub fn column(&self, i: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[i]).collect()
    }

    /// Per-replicate sums of the first `n` entries.
    pub fn partial_sums(&self, n: usize) -> Vec<f64> {
        self.values
            .iter()
            .map(|row| row[..n].iter().sum())
            .collect()
    }

    /// Export as CSV with columns `replicate,index,value`.
    pub fn to_csv<P: AsRef<std::path::Path>>(&self, path: P) -> Result<()> {
        crate::io::write_csv(
            path,
            &["replicate", "index", "value"],
            self.values.iter().enumerate().flat_map(|(r, row)| {
                row.iter()
                    .enumerate()
                    .map(move |(i, v)| vec![r as f64, i as f64, *v])
            }),
        )
    }

    fn from_sampler(
        sampler: &FieldSampler,
        n_items: usize,
        replicates: usize,
        seed: u64,
        kernel: NoiseKernel,
    ) -> Self {
        let values = exec::map_indexed(replicates, |r| {
            let mut rng = rng_for(seed, r as u64);
            sampler.sample(&mut rng)
        });
        SampleMatrix {
            values,
            n_items,
            seed,
            kernel,
        }
    }
}

/// Marginal law for [`gen_iid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IidDistribution {
    Gaussian,
    /// Uniform on `[-a, a]` with `a = sqrt(3 * variance)`.
    Uniform,
    /// Gaussian clamped to `[-3 sigma, 3 sigma]`, with the pre-clip scale
    /// solved numerically so the post-clip variance equals the request.
    Clipped,
}

fn check_dims(n_items: usize, replicates: usize) -> Result<()> {
    if n_items < 1 {
        return Err(Error::Config("n_items must be at least 1".into()));
    }
    if replicates < 1 {
        return Err(Error::Config("replicates must be at least 1".into()));
    }
    Ok(())
}

/// Generate i.i.d. entries with the requested marginal variance.
pub fn gen_iid(
    n_items: usize,
    replicates: usize,
    dist: IidDistribution,
    variance: f64,
    seed: u64,
) -> Result<SampleMatrix> {
    check_dims(n_items, replicates)?;
    let kernel = NoiseKernel::new(KernelKind::Iid, variance)?;
    let sigma = variance.sqrt();
    let draw: Box<dyn Fn(&mut rand_chacha::ChaCha8Rng) -> f64 + Sync + Send> = match dist {
        IidDistribution::Gaussian => Box::new(move |rng| {
            let z: f64 = StandardNormal.sample(rng);
            sigma * z
        }),
        IidDistribution::Uniform => {
            let a = (3.0 * variance).sqrt();
            Box::new(move |rng| a * (2.0 * rng.random::<f64>() - 1.0))
        }
        IidDistribution::Clipped => {
            let bound = 3.0 * sigma;
            let scale = clipped_scale(variance, bound);
            Box::new(move |rng| {
                let z: f64 = StandardNormal.sample(rng);
                (scale * z).clamp(-bound, bound)
            })
        }
    };
    let values = exec::map_indexed(replicates, |r| {
        let mut rng = rng_for(seed, r as u64);
        (0..n_items).map(|_| draw(&mut rng)).collect::<Vec<f64>>()
    });
    Ok(SampleMatrix {
        values,
        n_items,
        seed,
        kernel,
    })
}

/// Variance of `clamp(s Z, -b, b)` for standard normal `Z`.
fn clipped_variance(s: f64, b: f64) -> f64 {
    let c = b / s;
    let phi = stats::std_normal_pdf(c);
    let tail = 1.0 - stats::std_normal_cdf(c);
    s * s * (1.0 - 2.0 * c * phi - 2.0 * tail) + 2.0 * b * b * tail
}

/// Solve for the pre-clip scale giving the target post-clip variance.
fn clipped_scale(target_variance: f64, bound: f64) -> f64 {
    let (mut lo, mut hi) = (target_variance.sqrt(), 3.0 * target_variance.sqrt());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if clipped_variance(mid, bound) < target_variance {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Moving average of i.i.d. Gaussian innovations; correlations vanish
/// beyond the window length, marginal variance is
/// `innovation_variance * sum(weights^2)`.
pub fn gen_ma(
    n_items: usize,
    replicates: usize,
    weights: &[f64],
    innovation_variance: f64,
    seed: u64,
) -> Result<SampleMatrix> {
    check_dims(n_items, replicates)?;
    let kernel = NoiseKernel::new(
        KernelKind::MovingAverage {
            weights: weights.to_vec(),
        },
        innovation_variance,
    )?;
    let sampler = FieldSampler::stationary(&kernel, n_items)?;
    Ok(SampleMatrix::from_sampler(
        &sampler, n_items, replicates, seed, kernel,
    ))
}

/// Stationary Gaussian rows realizing the kernel's correlation law.
/// The covariance is checked for positive semidefiniteness before any
/// synthesis; infeasible kernels surface as errors, never as projections.
pub fn gen_kernel_gaussian(
    n_items: usize,
    replicates: usize,
    kernel: &NoiseKernel,
    seed: u64,
) -> Result<SampleMatrix> {
    check_dims(n_items, replicates)?;
    let sampler = FieldSampler::stationary(kernel, n_items)?;
    Ok(SampleMatrix::from_sampler(
        &sampler,
        n_items,
        replicates,
        seed,
        kernel.clone(),
    ))
}

/// Unit-variance fractional Gaussian noise with Hurst index `hurst`.
///
/// Partial sums satisfy `Var(S_N) = N^{2H}` exactly. `hurst = 0.5` is
/// accepted as the degenerate white-noise case; values outside `[0.5, 1)`
/// are configuration errors.
pub fn gen_long_memory(
    n_items: usize,
    replicates: usize,
    hurst: f64,
    seed: u64,
) -> Result<SampleMatrix> {
    check_dims(n_items, replicates)?;
    if hurst == 0.5 {
        return gen_iid(n_items, replicates, IidDistribution::Gaussian, 1.0, seed);
    }
    let kernel = NoiseKernel::new(KernelKind::LongMemory { hurst }, 1.0)?;
    gen_kernel_gaussian(n_items, replicates, &kernel, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{mean, pearson, variance};

    #[test]
    fn gen_iid_is_deterministic_and_finite() {
        let a = gen_iid(4, 1, IidDistribution::Gaussian, 1.0, 7).unwrap();
        let b = gen_iid(4, 1, IidDistribution::Gaussian, 1.0, 7).unwrap();
        assert_eq!(a.row(0).len(), 4);
        assert!(a.row(0).iter().all(|v| v.is_finite()));
        for (x, y) in a.row(0).iter().zip(b.row(0)) {
            assert_eq!(x.to_bits(), y.to_bits(), "rerun must be bit-identical");
        }
    }

    #[test]
    fn gen_iid_uniform_mean_near_zero() {
        // 1e6 draws of uniform on [-1, 1] (variance 1/3).
        let m = gen_iid(1000, 1000, IidDistribution::Uniform, 1.0 / 3.0, 3).unwrap();
        let all: Vec<f64> = m.rows().iter().flatten().copied().collect();
        assert!(all.iter().all(|v| v.abs() <= 1.0));
        assert!(mean(&all).abs() < 0.003, "mean = {}", mean(&all));
    }

    #[test]
    fn gen_iid_gaussian_variance_matches() {
        // Monte Carlo oracle: sample variance of 1e6 draws, sigma^2 = 2.
        let m = gen_iid(1000, 1000, IidDistribution::Gaussian, 2.0, 5).unwrap();
        let all: Vec<f64> = m.rows().iter().flatten().copied().collect();
        let v = variance(&all);
        assert!((v - 2.0).abs() < 0.02, "variance = {v}");
    }

    #[test]
    fn gen_iid_clipped_is_bounded_with_target_variance() {
        let m = gen_iid(1000, 500, IidDistribution::Clipped, 1.0, 11).unwrap();
        let all: Vec<f64> = m.rows().iter().flatten().copied().collect();
        assert!(all.iter().all(|v| v.abs() <= 3.0 + 1e-12));
        let v = variance(&all);
        assert!((v - 1.0).abs() < 0.01, "variance = {v}");
    }

    #[test]
    fn gen_ma_weight_one_matches_iid_statistics() {
        let m = gen_ma(64, 4000, &[1.0], 1.0, 13).unwrap();
        let col = m.column(10);
        assert!((variance(&col) - 1.0).abs() < 0.1);
        let c = pearson(&m.column(10), &m.column(11)).unwrap();
        assert!(c.abs() < 4.0 / (4000f64).sqrt() * 1.5, "lag-1 corr {c}");
    }

    #[test]
    fn gen_ma_equal_weights_lag_correlations() {
        // MA(1) identity: weights [1,1] give rho(1) = 0.5, rho(2) = 0.
        let reps = 8000;
        let m = gen_ma(32, reps, &[1.0, 1.0], 1.0, 17).unwrap();
        let tol = 5.0 / (reps as f64).sqrt();
        let r1 = pearson(&m.column(5), &m.column(6)).unwrap();
        let r2 = pearson(&m.column(5), &m.column(7)).unwrap();
        assert!((r1 - 0.5).abs() < tol, "rho(1) = {r1}");
        assert!(r2.abs() < tol, "rho(2) = {r2}");
    }

    #[test]
    fn gen_ma_analytic_autocorrelation_oracle() {
        // Oracle: rho(1) = (w0 w1) / (w0^2 + w1^2) = 0.5/1.25 = 0.4 for [1, 0.5].
        let weights = [1.0f64, 0.5];
        let oracle = weights[0] * weights[1] / (weights[0].powi(2) + weights[1].powi(2));
        assert!((oracle - 0.4).abs() < 1e-15);
        let m = gen_ma(100_000, 40, &weights, 1.0, 19).unwrap();
        // Single long row: ergodic lag-1 autocorrelation.
        let row = m.row(0);
        let a = &row[..row.len() - 1];
        let b = &row[1..];
        let r = pearson(a, b).unwrap();
        assert!((r - oracle).abs() < 0.01, "lag-1 corr {r} vs oracle {oracle}");
    }

    #[test]
    fn gen_kernel_gaussian_inverse_lag_succeeds_at_half() {
        let k = NoiseKernel::new(KernelKind::InverseLag { c: 0.5 }, 1.0).unwrap();
        let m = gen_kernel_gaussian(512, 100, &k, 23).unwrap();
        assert_eq!(m.replicates(), 100);
        assert!(m.rows().iter().flatten().all(|v| v.is_finite()));
    }

    #[test]
    fn gen_kernel_gaussian_exp_distance_limit_is_iid() {
        let k = NoiseKernel::new(KernelKind::ExpDistance { length: 1e-6 }, 1.0).unwrap();
        let reps = 4000;
        let m = gen_kernel_gaussian(16, reps, &k, 29).unwrap();
        let r = pearson(&m.column(3), &m.column(4)).unwrap();
        assert!(r.abs() < 4.0 / (reps as f64).sqrt() * 1.5, "lag-1 corr {r}");
    }

    #[test]
    fn gen_long_memory_variance_sum_law() {
        // Exact identity Var(S_N) = N^{2H} as oracle: H = 0.7, N = 100.
        let reps = 10_000;
        let m = gen_long_memory(100, reps, 0.7, 31).unwrap();
        let sums = m.partial_sums(100);
        let want = 100f64.powf(1.4);
        let got = variance(&sums);
        assert!(
            (got / want - 1.0).abs() < 0.05,
            "Var(S_100) = {got}, oracle {want}"
        );
    }

    #[test]
    fn gen_long_memory_h_half_is_white() {
        let m = gen_long_memory(64, 3000, 0.5, 37).unwrap();
        let r = pearson(&m.column(0), &m.column(1)).unwrap();
        assert!(r.abs() < 4.0 / (3000f64).sqrt() * 1.5);
    }

    #[test]
    fn gen_long_memory_rejects_out_of_range() {
        assert!(gen_long_memory(16, 2, 1.0, 1).is_err());
        assert!(gen_long_memory(16, 2, 0.3, 1).is_err());
    }

    #[test]
    fn cross_replicate_independence() {
        let k = NoiseKernel::new(KernelKind::InverseLag { c: 0.5 }, 1.0).unwrap();
        let m = gen_kernel_gaussian(2000, 2, &k, 41).unwrap();
        let r = pearson(m.row(0), m.row(1)).unwrap();
        assert!(r.abs() < 4.0 / (2000f64).sqrt(), "cross-replicate corr {r}");
    }
}

//! Limit covariance of normalized sums: `Cov(S_N) / (N h(N))` along a size
//! grid, with a successive-difference convergence diagnostic.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::mixing::ResidualLaw;
use crate::stats;

/// Estimates of `Cov(S_N)/(N h(N))` over a grid with a convergence trace.
#[derive(Debug, Clone)]
pub struct LimitCovariance {
    pub sizes: Vec<usize>,
    pub estimates: Vec<DMatrix<f64>>,
    /// Frobenius norms of successive estimate differences.
    pub successive_diffs: Vec<f64>,
    /// Last-grid estimate.
    pub final_estimate: DMatrix<f64>,
    /// False when the trace is still moving at the end of the grid (last
    /// relative step above 20%) or oscillating wildly.
    pub convergent: bool,
}

/// Estimate the limit covariance from per-size replicate sum vectors:
/// `per_size[g] = (N_g, sums)` where `sums[r]` is the (un-normalized)
/// vector sum `S_{N_g}` of replicate `r`. Needs at least 4 grid sizes.
pub fn limit_covariance(
    per_size: &[(usize, Vec<Vec<f64>>)],
    h_law: &ResidualLaw,
) -> Result<LimitCovariance> {
    if per_size.len() < 4 {
        return Err(Error::GridMismatch(format!(
            "limit covariance needs at least 4 grid sizes, got {}",
            per_size.len()
        )));
    }
    let mut sizes = Vec::with_capacity(per_size.len());
    let mut estimates = Vec::with_capacity(per_size.len());
    for (n, sums) in per_size {
        if sums.len() < 2 {
            return Err(Error::InsufficientReplicates {
                context: "limit_covariance",
                needed: 2,
                got: sums.len(),
            });
        }
        let h = h_law.evaluate(*n);
        if !(h > 0.0) {
            return Err(Error::Config(format!(
                "residual factor {} nonpositive at N={n}",
                h_law.describe()
            )));
        }
        sizes.push(*n);
        estimates.push(stats::cov_matrix(sums) / (*n as f64 * h));
    }
    let successive_diffs: Vec<f64> = estimates
        .windows(2)
        .map(|w| (&w[1] - &w[0]).norm())
        .collect();
    let final_estimate = estimates.last().unwrap().clone();
    let final_norm = final_estimate.norm();
    let last_rel = successive_diffs.last().unwrap() / final_norm.max(f64::MIN_POSITIVE);
    let max_diff = successive_diffs.iter().cloned().fold(0.0, f64::max);
    // Converged when the trace has settled: the last step is small relative
    // to the estimate and is not the largest step in the trace.
    let convergent = last_rel <= 0.2 && *successive_diffs.last().unwrap() <= max_diff + f64::EPSILON
        && (successive_diffs.len() < 2 || *successive_diffs.last().unwrap() <= 1.5 * max_diff);
    Ok(LimitCovariance {
        sizes,
        estimates,
        successive_diffs,
        final_estimate,
        convergent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::{gen_iid, gen_ma, gen_long_memory, IidDistribution};

    fn sums_over_grid(rows: &[Vec<f64>], sizes: &[usize]) -> Vec<(usize, Vec<Vec<f64>>)> {
        sizes
            .iter()
            .map(|&n| {
                let sums: Vec<Vec<f64>> = rows
                    .iter()
                    .map(|r| vec![r[..n].iter().sum::<f64>()])
                    .collect();
                (n, sums)
            })
            .collect()
    }

    #[test]
    fn iid_identity_limit() {
        let m = gen_iid(2048, 1500, IidDistribution::Gaussian, 1.0, 51).unwrap();
        let lc = limit_covariance(
            &sums_over_grid(m.rows(), &[256, 512, 1024, 2048]),
            &ResidualLaw::Constant,
        )
        .unwrap();
        let est = lc.final_estimate[(0, 0)];
        assert!((est - 1.0).abs() < 0.1, "limit {est}");
        assert!(lc.convergent);
    }

    #[test]
    fn ma_long_run_variance() {
        // Weights [1,1] scaled to unit marginal variance (innovation var
        // 0.5): long-run variance = (1 + 2*0.5) * 1 = 2.
        let m = gen_ma(2048, 1500, &[1.0, 1.0], 0.5, 53).unwrap();
        let lc = limit_covariance(
            &sums_over_grid(m.rows(), &[256, 512, 1024, 2048]),
            &ResidualLaw::Constant,
        )
        .unwrap();
        let est = lc.final_estimate[(0, 0)];
        assert!((est - 2.0).abs() < 0.2, "long-run variance {est}");
    }

    #[test]
    fn fgn_unit_limit_under_power_law() {
        // Var(S_N) = N^{2H}: dividing by N * N^{2H-1} gives exactly 1.
        let m = gen_long_memory(2048, 1200, 0.75, 59).unwrap();
        let lc = limit_covariance(
            &sums_over_grid(m.rows(), &[256, 512, 1024, 2048]),
            &ResidualLaw::Power(0.5),
        )
        .unwrap();
        let est = lc.final_estimate[(0, 0)];
        assert!((est - 1.0).abs() < 0.15, "limit {est}");
    }

    #[test]
    fn wild_trace_flagged_nonconvergent() {
        // Hand-built sums whose variance jumps at the last grid size.
        let mk = |v: f64| -> Vec<Vec<f64>> {
            (0..200)
                .map(|i| vec![if i % 2 == 0 { v } else { -v }])
                .collect()
        };
        let per_size = vec![
            (10usize, mk(1.0)),
            (20, mk(1.5)),
            (40, mk(2.0)),
            (80, mk(40.0)),
        ];
        let lc = limit_covariance(&per_size, &ResidualLaw::Constant).unwrap();
        assert!(!lc.convergent, "diffs {:?}", lc.successive_diffs);
    }
}

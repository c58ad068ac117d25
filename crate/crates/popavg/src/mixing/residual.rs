//! Residual factors: empirical `Var(S_N)/N` curves, the slowly-varying
//! test, and the closed-form growth-law catalog.
//!
//! For a sequence with uniformly bounded variance, `h(N) = Var(S_N)/N` is
//! the smallest useful residual factor: constant for summable correlations,
//! `log N` for `rho(n) = c/n`, `N/log N` for `rho(n) = 1/log(1+n)`, and
//! `N^{1-p}` for `rho(n) = n^{-p}` with `p` in (0,1). Whether `h` is slowly
//! varying (`h(kN)/h(N) -> 1`) decides whether the CLT applies.

use crate::error::{Error, Result};
use crate::stats;
use crate::stochastic::{KernelKind, NoiseKernel};

/// Empirical residual-factor curve: `h_hat(N) = Var(S_N) / N` across an
/// increasing size grid, variance taken across replicates.
#[derive(Debug, Clone)]
pub struct ResidualCurve {
    pub sizes: Vec<usize>,
    pub h_hat: Vec<f64>,
    /// Raw `Var(S_N)` estimates.
    pub variance_estimates: Vec<f64>,
    pub replicates_used: usize,
}

impl ResidualCurve {
    pub fn to_csv<P: AsRef<std::path::Path>>(&self, path: P) -> Result<()> {
        crate::io::write_csv(
            path,
            &["n", "h_hat", "var_s_n"],
            self.sizes
                .iter()
                .zip(self.h_hat.iter().zip(&self.variance_estimates))
                .map(|(n, (h, v))| vec![*n as f64, *h, *v]),
        )
    }
}

/// Estimate the residual curve from replicate rows. Refuses fewer than 30
/// replicates: the variance of a variance estimate is too large below that.
pub fn estimate_residual_curve(rows: &[Vec<f64>], sizes: &[usize]) -> Result<ResidualCurve> {
    if rows.len() < 30 {
        return Err(Error::InsufficientReplicates {
            context: "estimate_residual_curve",
            needed: 30,
            got: rows.len(),
        });
    }
    let len = rows[0].len();
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.is_empty() {
        return Err(Error::GridMismatch("empty size grid".into()));
    }
    if *sorted.last().unwrap() > len {
        return Err(Error::GridMismatch(format!(
            "max grid size {} exceeds sample length {len}",
            sorted.last().unwrap()
        )));
    }
    if sorted[0] == 0 {
        return Err(Error::GridMismatch("grid sizes must be positive".into()));
    }
    let mut h_hat = Vec::with_capacity(sorted.len());
    let mut variance_estimates = Vec::with_capacity(sorted.len());
    for &n in &sorted {
        let sums: Vec<f64> = rows.iter().map(|r| r[..n].iter().sum()).collect();
        let v = stats::variance(&sums);
        variance_estimates.push(v);
        h_hat.push(v / n as f64);
    }
    Ok(ResidualCurve {
        sizes: sorted,
        h_hat,
        variance_estimates,
        replicates_used: rows.len(),
    })
}

/// Verdict of the slowly-varying test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlowlyVarying {
    SlowlyVarying,
    NotSlowlyVarying,
    Inconclusive,
}

/// Ratio trace and verdict for `h(kN)/h(N) -> 1`.
#[derive(Debug, Clone)]
pub struct SlowlyVaryingReport {
    pub k: usize,
    pub band: f64,
    /// `(N, h_hat(kN)/h_hat(N))` for every grid point with `kN` on the grid.
    pub ratios: Vec<(usize, f64)>,
    pub verdict: SlowlyVarying,
}

/// Test whether the curve's growth is slowly varying at multiplier `k`,
/// deciding on the last available ratio with an acceptance band of
/// `1 +/- band`. Requires at least 3 ratios; otherwise inconclusive.
pub fn slowly_varying_test(curve: &ResidualCurve, k: usize, band: f64) -> SlowlyVaryingReport {
    let mut ratios = Vec::new();
    for (i, &n) in curve.sizes.iter().enumerate() {
        let target = n.saturating_mul(k);
        if let Some(j) = curve.sizes.iter().position(|&m| m == target) {
            if curve.h_hat[i] > 0.0 {
                ratios.push((n, curve.h_hat[j] / curve.h_hat[i]));
            }
        }
    }
    let verdict = if ratios.len() < 3 {
        SlowlyVarying::Inconclusive
    } else {
        let last = ratios.last().unwrap().1;
        if (last - 1.0).abs() <= band {
            SlowlyVarying::SlowlyVarying
        } else {
            SlowlyVarying::NotSlowlyVarying
        }
    };
    SlowlyVaryingReport {
        k,
        band,
        ratios,
        verdict,
    }
}

/// Closed-form residual growth laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResidualLaw {
    /// Summable correlations: `h(N) = 1`.
    Constant,
    /// `h(N) = log N`.
    Log,
    /// `h(N) = N / log N`.
    NOverLogN,
    /// `h(N) = N^alpha`.
    Power(f64),
}

impl ResidualLaw {
    /// Evaluate `h(N)`. Callers must guard against nonpositive values
    /// (e.g. `Log` at `N = 1`).
    pub fn evaluate(&self, n: usize) -> f64 {
        let nf = n as f64;
        match self {
            ResidualLaw::Constant => 1.0,
            ResidualLaw::Log => nf.ln(),
            ResidualLaw::NOverLogN => nf / nf.ln(),
            ResidualLaw::Power(a) => nf.powf(*a),
        }
    }

    /// Whether `h(kN)/h(N) -> 1` for all fixed `k`.
    pub fn slowly_varying(&self) -> bool {
        match self {
            ResidualLaw::Constant | ResidualLaw::Log => true,
            ResidualLaw::NOverLogN => false,
            ResidualLaw::Power(a) => *a == 0.0,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ResidualLaw::Constant => "constant".to_string(),
            ResidualLaw::Log => "log(N)".to_string(),
            ResidualLaw::NOverLogN => "N/log(N)".to_string(),
            ResidualLaw::Power(a) => format!("N^{a}"),
        }
    }
}

/// Closed-form residual factor for a catalog kernel, with the limit of
/// `Var(S_N) / (N h(N))` where one is known:
///
/// - i.i.d. / moving-average / exp-distance: constant law, limit = long-run
///   variance (sum of all autocovariances);
/// - inverse-lag `c/n`: `log N` law, limit `2 c sigma^2`;
/// - inverse-log: `N/log N` law, limit `sigma^2`;
/// - long memory `H`: power law `N^{2H-1}`, limit exactly `sigma^2` since
///   `Var(S_N) = sigma^2 N^{2H}`.
pub fn analytic_residual_factor(kernel: &NoiseKernel) -> Result<(ResidualLaw, f64)> {
    let v = kernel.marginal_variance();
    match kernel.kind() {
        KernelKind::Iid => Ok((ResidualLaw::Constant, v)),
        KernelKind::MovingAverage { weights } => {
            let s: f64 = weights.iter().sum();
            Ok((ResidualLaw::Constant, kernel.variance() * s * s))
        }
        KernelKind::ExpDistance { length } => {
            // Long-run variance: sigma^2 (1 + 2 sum_{n>=1} e^{-n/len}).
            let q = (-1.0 / length).exp();
            Ok((ResidualLaw::Constant, v * (1.0 + 2.0 * q / (1.0 - q))))
        }
        KernelKind::InverseLag { c } => Ok((ResidualLaw::Log, 2.0 * c * v)),
        KernelKind::InverseLog => Ok((ResidualLaw::NOverLogN, v)),
        KernelKind::LongMemory { hurst } => Ok((ResidualLaw::Power(2.0 * hurst - 1.0), v)),
    }
}

/// Growth-law family selected by [`classify_growth`].
#[derive(Debug, Clone)]
pub struct GrowthFit {
    pub law: ResidualLaw,
    pub r2: f64,
    /// Fitted power exponent (log h vs log N slope) for reference.
    pub power_exponent: f64,
    pub power_exponent_se: f64,
}

/// Choose the growth family that best explains an empirical curve by
/// comparing least-squares fits: `h` linear in `log N` (log law), `log h`
/// linear in `log N` (power law, exponent fitted), constant, and
/// `N / log N` (scale-only). Selection is by R^2 in each family's natural
/// coordinates.
pub fn classify_growth(curve: &ResidualCurve) -> Result<GrowthFit> {
    if curve.sizes.len() < 3 {
        return Err(Error::GridMismatch(
            "growth classification needs at least 3 grid sizes".into(),
        ));
    }
    if curve.h_hat.iter().any(|h| *h <= 0.0) {
        return Err(Error::GridMismatch("nonpositive h_hat in curve".into()));
    }
    let ln_n: Vec<f64> = curve.sizes.iter().map(|&n| (n as f64).ln()).collect();
    let ln_h: Vec<f64> = curve.h_hat.iter().map(|h| h.ln()).collect();

    // Power family: ln h = a + b ln N.
    let (_, b_pow, r2_pow, se_pow) = stats::linear_fit(&ln_n, &ln_h);
    // Log family: h = a + b ln N, demand a genuinely increasing fit.
    let (_, b_log, r2_log, _) = stats::linear_fit(&ln_n, &curve.h_hat);
    // Constant family: R^2 of the mean against log-scale variation.
    let mean_h = stats::mean(&curve.h_hat);
    let ss_tot: f64 = curve.h_hat.iter().map(|h| (h - mean_h) * (h - mean_h)).sum();
    let rel_spread = if mean_h > 0.0 {
        (ss_tot / curve.h_hat.len() as f64).sqrt() / mean_h
    } else {
        f64::INFINITY
    };
    // N/log N family: h = a N/ln N, scale fitted by least squares.
    let basis: Vec<f64> = curve
        .sizes
        .iter()
        .map(|&n| n as f64 / (n as f64).ln())
        .collect();
    let scale = {
        let num: f64 = basis.iter().zip(&curve.h_hat).map(|(x, y)| x * y).sum();
        let den: f64 = basis.iter().map(|x| x * x).sum();
        num / den
    };
    let ss_res_nlog: f64 = basis
        .iter()
        .zip(&curve.h_hat)
        .map(|(x, y)| {
            let e = y - scale * x;
            e * e
        })
        .sum();
    let r2_nlog = if ss_tot > 0.0 { 1.0 - ss_res_nlog / ss_tot } else { 0.0 };

    // A flat curve (relative spread under 5%) is constant; otherwise pick
    // the best-fitting family. The log family only wins when its curvature
    // advantage over a pure power law is real: for power data, h vs ln N is
    // convex and fits poorly.
    let law = if rel_spread < 0.05 {
        ResidualLaw::Constant
    } else {
        let mut best = (ResidualLaw::Power(b_pow), r2_pow);
        if r2_log > best.1 && b_log > 0.0 {
            best = (ResidualLaw::Log, r2_log);
        }
        if r2_nlog > best.1 {
            best = (ResidualLaw::NOverLogN, r2_nlog);
        }
        best.0
    };
    let r2 = match law {
        ResidualLaw::Constant => 1.0,
        ResidualLaw::Log => r2_log,
        ResidualLaw::NOverLogN => r2_nlog,
        ResidualLaw::Power(_) => r2_pow,
    };
    Ok(GrowthFit {
        law,
        r2,
        power_exponent: b_pow,
        power_exponent_se: se_pow,
    })
}

/// Monitor for the shifted partial-sum variance ratio
/// `Var(S_{M+N} - S_M) / Var(S_N)` on a finite `(M, N)` grid. The theory
/// requires a supremum over all `M, N`, which is unverifiable; this reports
/// the largest ratio observed so gross violations surface.
pub fn shifted_sum_ratio_monitor(rows: &[Vec<f64>], sizes: &[usize], shifts: &[usize]) -> f64 {
    let len = rows[0].len();
    let mut worst = 0.0f64;
    for &n in sizes {
        let base: Vec<f64> = rows.iter().map(|r| r[..n.min(len)].iter().sum()).collect();
        let vb = stats::variance(&base);
        if vb <= 0.0 {
            continue;
        }
        for &m in shifts {
            if m + n > len {
                continue;
            }
            let shifted: Vec<f64> = rows.iter().map(|r| r[m..m + n].iter().sum()).collect();
            let ratio = stats::variance(&shifted) / vb;
            worst = worst.max(ratio);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::{gen_iid, gen_kernel_gaussian, gen_long_memory, IidDistribution};

    fn exact_curve(law: &ResidualLaw, sizes: &[usize]) -> ResidualCurve {
        ResidualCurve {
            sizes: sizes.to_vec(),
            h_hat: sizes.iter().map(|&n| law.evaluate(n)).collect(),
            variance_estimates: sizes
                .iter()
                .map(|&n| law.evaluate(n) * n as f64)
                .collect(),
            replicates_used: 1000,
        }
    }

    #[test]
    fn refuses_few_replicates() {
        let rows = vec![vec![0.0; 8]; 10];
        assert!(matches!(
            estimate_residual_curve(&rows, &[4]),
            Err(Error::InsufficientReplicates { .. })
        ));
    }

    #[test]
    fn iid_curve_is_flat_at_variance() {
        let m = gen_iid(1024, 2000, IidDistribution::Gaussian, 1.0, 211).unwrap();
        let curve = estimate_residual_curve(m.rows(), &[64, 128, 256, 512, 1024]).unwrap();
        for (n, h) in curve.sizes.iter().zip(&curve.h_hat) {
            assert!((h - 1.0).abs() < 0.1, "h_hat({n}) = {h}");
        }
    }

    #[test]
    fn slowly_varying_on_exact_laws() {
        let sizes = [256, 512, 1024, 2048, 4096, 8192];
        // Log law: ratios tend to 1.
        let rep = slowly_varying_test(&exact_curve(&ResidualLaw::Log, &sizes), 2, 0.1);
        assert_eq!(rep.verdict, SlowlyVarying::SlowlyVarying);
        // Square-root power law: ratio = sqrt(2) = 1.4142.
        let rep = slowly_varying_test(&exact_curve(&ResidualLaw::Power(0.5), &sizes), 2, 0.1);
        assert_eq!(rep.verdict, SlowlyVarying::NotSlowlyVarying);
        let last = rep.ratios.last().unwrap().1;
        assert!((last - std::f64::consts::SQRT_2).abs() < 1e-12, "ratio {last}");
        // Constant: ratio exactly 1.
        let rep = slowly_varying_test(&exact_curve(&ResidualLaw::Constant, &sizes), 2, 0.1);
        assert_eq!(rep.verdict, SlowlyVarying::SlowlyVarying);
        assert!(rep.ratios.iter().all(|(_, r)| (r - 1.0).abs() < 1e-15));
    }

    #[test]
    fn grid_mismatch_is_inconclusive() {
        let curve = exact_curve(&ResidualLaw::Log, &[100, 300, 900]);
        let rep = slowly_varying_test(&curve, 2, 0.1);
        assert_eq!(rep.verdict, SlowlyVarying::Inconclusive);
    }

    #[test]
    fn analytic_catalog() {
        let inv = NoiseKernel::new(KernelKind::InverseLag { c: 0.5 }, 1.0).unwrap();
        let (law, limit) = analytic_residual_factor(&inv).unwrap();
        assert_eq!(law, ResidualLaw::Log);
        assert!(law.slowly_varying());
        assert!((limit - 1.0).abs() < 1e-12, "2 c sigma^2 = {limit}");

        let lm = NoiseKernel::new(KernelKind::LongMemory { hurst: 0.75 }, 1.0).unwrap();
        let (law, _) = analytic_residual_factor(&lm).unwrap();
        assert_eq!(law, ResidualLaw::Power(0.5));
        assert!(!law.slowly_varying());

        let il = NoiseKernel::new(KernelKind::InverseLog, 1.0).unwrap();
        let (law, _) = analytic_residual_factor(&il).unwrap();
        assert_eq!(law, ResidualLaw::NOverLogN);
        assert!(!law.slowly_varying());

        let ma = NoiseKernel::new(
            KernelKind::MovingAverage { weights: vec![1.0, 1.0] },
            0.5,
        )
        .unwrap();
        let (law, limit) = analytic_residual_factor(&ma).unwrap();
        assert_eq!(law, ResidualLaw::Constant);
        // Long-run variance (1+1)^2 * 0.5 = 2: marginal 1, 1 + 2*0.5.
        assert!((limit - 2.0).abs() < 1e-12);
    }

    #[test]
    fn classify_exact_laws() {
        let sizes: Vec<usize> = (5..=12).map(|k| 1usize << k).collect();
        let fit = classify_growth(&exact_curve(&ResidualLaw::Log, &sizes)).unwrap();
        assert_eq!(fit.law, ResidualLaw::Log, "log data misclassified: {fit:?}");
        let fit = classify_growth(&exact_curve(&ResidualLaw::Power(0.5), &sizes)).unwrap();
        match fit.law {
            ResidualLaw::Power(a) => assert!((a - 0.5).abs() < 0.02),
            other => panic!("power data misclassified as {other:?}"),
        }
        let fit = classify_growth(&exact_curve(&ResidualLaw::Constant, &sizes)).unwrap();
        assert_eq!(fit.law, ResidualLaw::Constant);
        let fit = classify_growth(&exact_curve(&ResidualLaw::NOverLogN, &sizes)).unwrap();
        assert_eq!(fit.law, ResidualLaw::NOverLogN);
    }

    #[test]
    fn long_memory_curve_matches_exact_variance_law() {
        // Var(S_N) = N^{2H} exactly; fitted exponent of h_hat is 2H-1.
        let m = gen_long_memory(4096, 600, 0.75, 223).unwrap();
        let sizes: Vec<usize> = (6..=12).map(|k| 1usize << k).collect();
        let curve = estimate_residual_curve(m.rows(), &sizes).unwrap();
        let fit = classify_growth(&curve).unwrap();
        assert!(
            (fit.power_exponent - 0.5).abs() < 0.1,
            "exponent {}",
            fit.power_exponent
        );
        let top = *curve.sizes.last().unwrap();
        let want = (top as f64).powf(1.5);
        let got = *curve.variance_estimates.last().unwrap();
        assert!(
            (got / want - 1.0).abs() < 0.2,
            "Var(S_{top}) = {got}, oracle {want}"
        );
    }

    #[test]
    fn existence_bound_h_below_n() {
        // h_hat(N) <= N * marginal variance * (1 + tol) for any kernel.
        let k = NoiseKernel::new(KernelKind::InverseLog, 1.0).unwrap();
        let m = gen_kernel_gaussian(512, 200, &k, 229).unwrap();
        let curve = estimate_residual_curve(m.rows(), &[64, 128, 256, 512]).unwrap();
        for (n, h) in curve.sizes.iter().zip(&curve.h_hat) {
            assert!(*h <= *n as f64 * 1.0 * 1.5, "h_hat({n}) = {h} exceeds N bound");
        }
    }

    #[test]
    fn shifted_ratio_monitor_near_one_for_stationary() {
        let m = gen_iid(512, 500, IidDistribution::Gaussian, 1.0, 233).unwrap();
        let worst = shifted_sum_ratio_monitor(m.rows(), &[32, 64, 128], &[0, 16, 64, 256]);
        assert!(worst < 1.5, "worst shifted ratio {worst}");
    }
}

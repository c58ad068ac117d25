//! Normalized population averages.
//!
//! The averaged state is `xbar(t) = sum_i (x_i(t) - E[x_i(t)]) / phi(N)`
//! with `phi(N) = sqrt(N h(N))` under the residual-factor normalization
//! (or `N` for the plain mean). Centering always uses the cross-replicate
//! mean — never a time average — because the expectation being removed is
//! an ensemble quantity. The spatial variant sums over subsystems within a
//! Euclidean ball and normalizes by `N_R`.

use crate::error::{Error, Result};
use crate::mixing::ResidualLaw;
use crate::model::TrajectoryEnsemble;
use crate::spatial::SpatialLayout;

/// Normalization of the population average.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `1 / sqrt(N h(N))`: the residual-factor normalization.
    SqrtNh,
    /// `1 / N`: plain mean.
    PlainMean,
}

/// Per-replicate time series of normalized population averages.
#[derive(Debug, Clone)]
pub struct AveragedSeries {
    /// `xbar[rep][t][k]`, `t` in `0..=t_steps`.
    pub xbar: Vec<Vec<Vec<f64>>>,
    /// `wbar[rep][t][k]`, `t` in `0..t_steps`.
    pub wbar: Vec<Vec<Vec<f64>>>,
    pub normalization: Normalization,
    pub h_law: ResidualLaw,
    /// Population (or ball) size the normalization used.
    pub size_used: usize,
}

impl AveragedSeries {
    pub fn replicates(&self) -> usize {
        self.xbar.len()
    }

    pub fn t_steps(&self) -> usize {
        self.wbar.first().map(|w| w.len()).unwrap_or(0)
    }

    pub fn state_dim(&self) -> usize {
        self.xbar[0][0].len()
    }

    pub fn noise_dim(&self) -> usize {
        self.wbar[0][0].len()
    }

    /// `xbar(t)` across replicates.
    pub fn xbar_at(&self, t: usize) -> Vec<Vec<f64>> {
        self.xbar.iter().map(|rep| rep[t].clone()).collect()
    }

    /// `wbar(t)` across replicates.
    pub fn wbar_at(&self, t: usize) -> Vec<Vec<f64>> {
        self.wbar.iter().map(|rep| rep[t].clone()).collect()
    }

    /// `[xbar(t); wbar(t)]` joined, across replicates.
    pub fn ybar_at(&self, t: usize) -> Vec<Vec<f64>> {
        self.xbar
            .iter()
            .zip(&self.wbar)
            .map(|(x, w)| {
                let mut v = x[t].clone();
                v.extend_from_slice(&w[t]);
                v
            })
            .collect()
    }
}

fn phi(norm: Normalization, n: usize, h_law: &ResidualLaw) -> Result<f64> {
    match norm {
        Normalization::PlainMean => Ok(n as f64),
        Normalization::SqrtNh => {
            let h = h_law.evaluate(n);
            if !(h > 0.0) {
                return Err(Error::Config(format!(
                    "residual factor {} nonpositive at N={n}",
                    h_law.describe()
                )));
            }
            Ok((n as f64 * h).sqrt())
        }
    }
}

/// Average over all subsystems.
pub fn average_series(
    ensemble: &TrajectoryEnsemble,
    normalization: Normalization,
    h_law: &ResidualLaw,
) -> Result<AveragedSeries> {
    let all: Vec<usize> = (0..ensemble.n_subsystems).collect();
    average_over(ensemble, &all, normalization, h_law)
}

/// Average over the subsystems inside the Euclidean ball of radius
/// `radius`, per the spatial averaging window.
pub fn average_series_spatial(
    ensemble: &TrajectoryEnsemble,
    layout: &SpatialLayout,
    radius: f64,
    normalization: Normalization,
    h_law: &ResidualLaw,
) -> Result<AveragedSeries> {
    if layout.len() != ensemble.n_subsystems {
        return Err(Error::GridMismatch(format!(
            "layout size {} vs ensemble subsystems {}",
            layout.len(),
            ensemble.n_subsystems
        )));
    }
    let idx = layout.indices_in_ball(radius)?;
    if idx.is_empty() {
        return Err(Error::EmptyWindow(radius));
    }
    average_over(ensemble, &idx, normalization, h_law)
}

fn average_over(
    ensemble: &TrajectoryEnsemble,
    indices: &[usize],
    normalization: Normalization,
    h_law: &ResidualLaw,
) -> Result<AveragedSeries> {
    if indices.is_empty() {
        return Err(Error::EmptyWindow(0.0));
    }
    let n_used = indices.len();
    let scale = 1.0 / phi(normalization, n_used, h_law)?;
    let reps = ensemble.replicates;
    let t_steps = ensemble.t_steps;
    let sd = ensemble.state_dim;
    let nd = ensemble.noise_dim;

    // Cross-replicate means per (t, i, k) for centering the states.
    let mut means = vec![0.0; (t_steps + 1) * indices.len() * sd];
    for r in 0..reps {
        for t in 0..=t_steps {
            let block = ensemble.states_at(r, t);
            for (pos, &i) in indices.iter().enumerate() {
                for k in 0..sd {
                    means[(t * n_used + pos) * sd + k] += block[i * sd + k];
                }
            }
        }
    }
    for v in means.iter_mut() {
        *v /= reps as f64;
    }

    let mut xbar = vec![vec![vec![0.0; sd]; t_steps + 1]; reps];
    let mut wbar = vec![vec![vec![0.0; nd]; t_steps]; reps];
    for r in 0..reps {
        for t in 0..=t_steps {
            let block = ensemble.states_at(r, t);
            for (pos, &i) in indices.iter().enumerate() {
                for k in 0..sd {
                    xbar[r][t][k] += block[i * sd + k] - means[(t * n_used + pos) * sd + k];
                }
            }
            for k in 0..sd {
                xbar[r][t][k] *= scale;
            }
        }
        for t in 0..t_steps {
            let block = ensemble.noises_at(r, t);
            for &i in indices {
                for k in 0..nd {
                    wbar[r][t][k] += block[i * nd + k];
                }
            }
            for k in 0..nd {
                wbar[r][t][k] *= scale;
            }
        }
    }
    Ok(AveragedSeries {
        xbar,
        wbar,
        normalization,
        h_law: *h_law,
        size_used: n_used,
    })
}

/// Normalized partial sums of static replicate rows:
/// `S_n / sqrt(n h(n))` per replicate (no centering; rows are zero-mean by
/// construction of the generators).
pub fn normalized_sums(rows: &[Vec<f64>], n: usize, h_law: &ResidualLaw) -> Result<Vec<f64>> {
    if n == 0 || n > rows[0].len() {
        return Err(Error::GridMismatch(format!("invalid prefix length {n}")));
    }
    let h = h_law.evaluate(n);
    if !(h > 0.0) {
        return Err(Error::Config(format!(
            "residual factor {} nonpositive at N={n}",
            h_law.describe()
        )));
    }
    let scale = 1.0 / (n as f64 * h).sqrt();
    Ok(rows
        .iter()
        .map(|r| r[..n].iter().sum::<f64>() * scale)
        .collect())
}

/// Two-component normalized sums (even- and odd-indexed entries), turning
/// a scalar row into a correlated bivariate average for multivariate CLT
/// checks.
pub fn normalized_even_odd_sums(
    rows: &[Vec<f64>],
    n: usize,
    h_law: &ResidualLaw,
) -> Result<Vec<Vec<f64>>> {
    if n == 0 || n > rows[0].len() {
        return Err(Error::GridMismatch(format!("invalid prefix length {n}")));
    }
    let half = n / 2;
    let h = h_law.evaluate(half.max(2));
    if !(h > 0.0) {
        return Err(Error::Config("nonpositive residual factor".into()));
    }
    let scale = 1.0 / (half as f64 * h).sqrt();
    Ok(rows
        .iter()
        .map(|r| {
            let mut even = 0.0;
            let mut odd = 0.0;
            for (i, v) in r[..n].iter().enumerate() {
                if i % 2 == 0 {
                    even += v;
                } else {
                    odd += v;
                }
            }
            vec![even * scale, odd * scale]
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        build_population, DynamicsFamily, Heterogeneity, InitDist, NoiseModulation, PopulationSpec,
    };
    use crate::stats::variance;
    use crate::stochastic::{gen_long_memory, KernelKind, NoiseKernel};

    fn small_ensemble(n: usize, reps: usize) -> TrajectoryEnsemble {
        let pop = build_population(
            PopulationSpec {
                n_subsystems: n,
                state_dim: 1,
                noise_dim: 1,
                tau: 1.0,
                family: DynamicsFamily::SaturatedLinear { gain: 0.7, bound: 1.0 },
                heterogeneity: Heterogeneity::none(),
                noise: NoiseKernel::new(KernelKind::Iid, 0.25).unwrap(),
                init: InitDist::Delta0,
                noise_modulation: NoiseModulation::None,
                seed: 2,
            },
            None,
        )
        .unwrap();
        pop.simulate(4, reps, 77).unwrap()
    }

    #[test]
    fn centering_makes_replicate_mean_zero() {
        let ens = small_ensemble(16, 200);
        let avg = average_series(&ens, Normalization::SqrtNh, &ResidualLaw::Constant).unwrap();
        for t in 0..=4 {
            let m: f64 = (0..200).map(|r| avg.xbar[r][t][0]).sum::<f64>() / 200.0;
            assert!(m.abs() < 1e-12, "xbar mean at t={t}: {m}");
        }
    }

    #[test]
    fn single_subsystem_identity() {
        // N=1, h=1: xbar(t) = x_1(t) - cross-replicate mean.
        let ens = small_ensemble(1, 50);
        let avg = average_series(&ens, Normalization::SqrtNh, &ResidualLaw::Constant).unwrap();
        let col = ens.state_column(3, 0, 0);
        let m = crate::stats::mean(&col);
        for r in 0..50 {
            assert!((avg.xbar[r][3][0] - (col[r] - m)).abs() < 1e-12);
        }
    }

    #[test]
    fn iid_normalized_variance_independent_of_n() {
        // Var(xbar) of an i.i.d. unit-variance field under h = 1 is ~1
        // for any N: check the noise averages where the variance is exact.
        let ens = small_ensemble(64, 800);
        let avg = average_series(&ens, Normalization::SqrtNh, &ResidualLaw::Constant).unwrap();
        let w: Vec<f64> = (0..800).map(|r| avg.wbar[r][2][0]).collect();
        let v = variance(&w);
        assert!((v - 0.25).abs() < 0.05, "Var(wbar) = {v}");
    }

    #[test]
    fn long_memory_sums_flat_under_matching_h() {
        // fGn H=0.75 with h = N^{0.5}: Var of normalized sums is flat in N.
        let m = gen_long_memory(4096, 400, 0.75, 909).unwrap();
        let law = ResidualLaw::Power(0.5);
        let mut vars = Vec::new();
        for n in [256usize, 1024, 4096] {
            let sums = normalized_sums(m.rows(), n, &law).unwrap();
            vars.push(variance(&sums));
        }
        let max = vars.iter().cloned().fold(f64::MIN, f64::max);
        let min = vars.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max / min < 1.3, "normalized variances {vars:?}");
        // Each should be near 1 (the exact limit for fGn).
        for v in &vars {
            assert!((v - 1.0).abs() < 0.25, "normalized variance {v}");
        }
    }

    #[test]
    fn spatial_window_errors() {
        let ens = small_ensemble(4, 40);
        let layout = SpatialLayout::from_positions(
            2,
            vec![vec![3.0, 0.0], vec![0.0, 3.5], vec![2.0, 2.0], vec![0.5, 0.0]],
            4.0,
        )
        .unwrap();
        // Radius below every position's norm: empty window.
        let err =
            average_series_spatial(&ens, &layout, 0.2, Normalization::SqrtNh, &ResidualLaw::Constant)
                .unwrap_err();
        assert!(matches!(err, Error::EmptyWindow(_)));
        let ok =
            average_series_spatial(&ens, &layout, 3.0, Normalization::SqrtNh, &ResidualLaw::Constant)
                .unwrap();
        assert_eq!(ok.size_used, 3);
    }

    #[test]
    fn log_law_rejected_at_n_one() {
        let ens = small_ensemble(1, 40);
        assert!(average_series(&ens, Normalization::SqrtNh, &ResidualLaw::Log).is_err());
    }
}

//! Population construction and trajectory simulation.
//!
//! A population fixes the coupling graph (banded in index space, or by
//! Euclidean radius when a spatial layout is attached), the per-subsystem
//! heterogeneity draws, and the noise-field sampler. Noise fields are
//! correlated across subsystems within one time step and independent
//! across time; each noise draw happens after the state update that
//! consumed the previous draw, so `w(t)` is independent of `x(t)` by
//! construction. Replicates integrate on pre-split seed streams and may
//! run in any order.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::family::DynamicsFamily;
use crate::error::{Error, Result};
use crate::exec;
use crate::seed::{rng_for, sub_seed};
use crate::spatial::SpatialLayout;
use crate::stochastic::{FieldSampler, NoiseKernel};

/// Initial state distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitDist {
    /// All states start at zero.
    Delta0,
    /// Independent `N(mean, sigma^2)` per state coordinate.
    Gaussian { mean: f64, sigma: f64 },
}

/// Optional deterministic modulation of the noise standard deviation,
/// used to construct stationarity-violating positive controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModulation {
    None,
    /// Factor `1 + amplitude * sin(2 pi t / period)` on the noise std.
    Periodic { period: f64, amplitude: f64 },
}

impl NoiseModulation {
    fn factor(&self, t: usize) -> f64 {
        match self {
            NoiseModulation::None => 1.0,
            NoiseModulation::Periodic { period, amplitude } => {
                1.0 + amplitude * (2.0 * std::f64::consts::PI * t as f64 / period).sin()
            }
        }
    }
}

/// Bounded per-subsystem parameter jitter, drawn once at build time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Heterogeneity {
    /// Relative uniform jitter on the gain/slope: `g_i = g (1 + U(-j, j))`.
    pub gain_jitter: f64,
    /// Absolute uniform jitter on the threshold.
    pub threshold_jitter: f64,
}

impl Heterogeneity {
    pub fn none() -> Self {
        Self {
            gain_jitter: 0.0,
            threshold_jitter: 0.0,
        }
    }
}

/// Full description of a simulated population.
#[derive(Debug, Clone)]
pub struct PopulationSpec {
    pub n_subsystems: usize,
    pub state_dim: usize,
    pub noise_dim: usize,
    /// Coupling range: index units (banded) or Euclidean length (spatial).
    pub tau: f64,
    pub family: DynamicsFamily,
    pub heterogeneity: Heterogeneity,
    pub noise: NoiseKernel,
    pub init: InitDist,
    pub noise_modulation: NoiseModulation,
    pub seed: u64,
}

impl PopulationSpec {
    fn validate(&self) -> Result<()> {
        if self.n_subsystems < 1 {
            return Err(Error::Config("population needs at least 1 subsystem".into()));
        }
        if self.state_dim < 1 || self.noise_dim < 1 {
            return Err(Error::Config("state and noise dimensions must be at least 1".into()));
        }
        if self.tau < 0.0 {
            return Err(Error::Config(format!("tau must be nonnegative, got {}", self.tau)));
        }
        self.family.validate().map_err(Error::Config)?;
        if let NoiseModulation::Periodic { period, amplitude } = self.noise_modulation {
            if !(period > 0.0) || !(0.0..=1.0).contains(&amplitude) {
                return Err(Error::Config(
                    "periodic modulation needs period > 0 and amplitude in [0, 1]".into(),
                ));
            }
        }
        Ok(())
    }

    /// Canonical one-line description, hashed into run manifests.
    pub fn describe(&self) -> String {
        format!(
            "n={} state_dim={} noise_dim={} tau={} family={:?} het=({},{}) noise={:?} init={:?} mod={:?} seed={}",
            self.n_subsystems,
            self.state_dim,
            self.noise_dim,
            self.tau,
            self.family,
            self.heterogeneity.gain_jitter,
            self.heterogeneity.threshold_jitter,
            self.noise,
            self.init,
            self.noise_modulation,
            self.seed
        )
    }
}

/// A built population: coupling graph, recorded heterogeneity draws, and
/// the noise sampler. Immutable after construction.
#[derive(Debug)]
pub struct Population {
    spec: PopulationSpec,
    neighbors: Vec<Vec<usize>>,
    gains: Vec<f64>,
    thresholds: Vec<f64>,
    layout: Option<SpatialLayout>,
    sampler: FieldSampler,
}

/// Banded index neighborhoods: `j` with `|i - j| <= tau`.
pub fn banded_neighborhoods(n: usize, tau: f64) -> Vec<Vec<usize>> {
    let range = tau.floor().max(0.0) as usize;
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(range);
            let hi = (i + range).min(n - 1);
            (lo..=hi).collect()
        })
        .collect()
}

/// Build a population from its spec; with a layout, neighborhoods are by
/// Euclidean radius `tau` and the noise kernel is applied over Euclidean
/// distances. An empty Euclidean neighborhood degenerates to self-only.
pub fn build_population(spec: PopulationSpec, layout: Option<SpatialLayout>) -> Result<Population> {
    spec.validate()?;
    let n = spec.n_subsystems;
    let (neighbors, sampler) = match &layout {
        Some(l) => {
            if l.len() != n {
                return Err(Error::Config(format!(
                    "layout has {} points but population has {n} subsystems",
                    l.len()
                )));
            }
            (
                l.neighborhoods(spec.tau)?,
                FieldSampler::spatial(&spec.noise, l.positions())?,
            )
        }
        None => (
            banded_neighborhoods(n, spec.tau),
            FieldSampler::stationary(&spec.noise, n)?,
        ),
    };
    // Heterogeneity draws: fixed at build time, recorded on the population.
    let mut rng = rng_for(spec.seed, u64::MAX - 1);
    let base = spec.family.base_gain();
    let gj = spec.heterogeneity.gain_jitter;
    let tj = spec.heterogeneity.threshold_jitter;
    let base_threshold = match &spec.family {
        DynamicsFamily::WilsonCowanLike { threshold, .. } => *threshold,
        _ => 0.0,
    };
    let gains: Vec<f64> = (0..n)
        .map(|_| base * (1.0 + gj * (2.0 * rng.random::<f64>() - 1.0)))
        .collect();
    let thresholds: Vec<f64> = (0..n)
        .map(|_| base_threshold + tj * (2.0 * rng.random::<f64>() - 1.0))
        .collect();
    Ok(Population {
        spec,
        neighbors,
        gains,
        thresholds,
        layout,
        sampler,
    })
}

/// Exactly-linear reference kind for [`linear_reference_population`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinearReference {
    /// `x(t+1) = gain * x(t) + w(t)`, time-invariant.
    Lti { gain: f64 },
    /// `y(t+1) = a(t) y(t)` with `a(t) = exp(2^t)` precomputed from the
    /// initial distribution `N(e, 1)`.
    ExpectationSchedule,
}

/// Reference population with exactly linear macroscopic truth, used as
/// ground truth where the nonlinearity gap must vanish.
pub fn linear_reference_population(
    n_subsystems: usize,
    noise: NoiseKernel,
    kind: LinearReference,
    seed: u64,
) -> Result<Population> {
    let (family, init) = match kind {
        LinearReference::Lti { gain } => (DynamicsFamily::Linear { gain }, InitDist::Delta0),
        LinearReference::ExpectationSchedule => (
            DynamicsFamily::ExpectationSchedule,
            InitDist::Gaussian {
                mean: std::f64::consts::E,
                sigma: 1.0,
            },
        ),
    };
    build_population(
        PopulationSpec {
            n_subsystems,
            state_dim: 1,
            noise_dim: 1,
            tau: 0.0,
            family,
            heterogeneity: Heterogeneity::none(),
            noise,
            init,
            noise_modulation: NoiseModulation::None,
            seed,
        },
        None,
    )
}

/// Replicate-by-time-by-subsystem trajectory arrays.
#[derive(Debug, Clone)]
pub struct TrajectoryEnsemble {
    /// `[rep][t][i][k]`, `t` in `0..=t_steps`, flattened.
    states: Vec<f64>,
    /// `[rep][t][i][k]`, `t` in `0..t_steps`, flattened.
    noises: Vec<f64>,
    pub replicates: usize,
    pub t_steps: usize,
    pub n_subsystems: usize,
    pub state_dim: usize,
    pub noise_dim: usize,
    pub seed: u64,
}

impl TrajectoryEnsemble {
    fn state_block(&self) -> usize {
        self.n_subsystems * self.state_dim
    }

    fn noise_block(&self) -> usize {
        self.n_subsystems * self.noise_dim
    }

    /// All subsystem states at `(rep, t)`, laid out `[i][k]`.
    pub fn states_at(&self, rep: usize, t: usize) -> &[f64] {
        let b = self.state_block();
        let off = (rep * (self.t_steps + 1) + t) * b;
        &self.states[off..off + b]
    }

    /// All subsystem noises at `(rep, t)`, laid out `[i][k]`.
    pub fn noises_at(&self, rep: usize, t: usize) -> &[f64] {
        let b = self.noise_block();
        let off = (rep * self.t_steps + t) * b;
        &self.noises[off..off + b]
    }

    pub fn state(&self, rep: usize, t: usize, i: usize, k: usize) -> f64 {
        self.states_at(rep, t)[i * self.state_dim + k]
    }

    pub fn noise(&self, rep: usize, t: usize, i: usize, k: usize) -> f64 {
        self.noises_at(rep, t)[i * self.noise_dim + k]
    }

    /// Column of one state coordinate across replicates.
    pub fn state_column(&self, t: usize, i: usize, k: usize) -> Vec<f64> {
        (0..self.replicates).map(|r| self.state(r, t, i, k)).collect()
    }
}

impl Population {
    pub fn spec(&self) -> &PopulationSpec {
        &self.spec
    }

    pub fn neighbors(&self) -> &[Vec<usize>] {
        &self.neighbors
    }

    /// Recorded per-subsystem gain draws.
    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    /// Recorded per-subsystem threshold draws.
    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn layout(&self) -> Option<&SpatialLayout> {
        self.layout.as_ref()
    }

    /// One synchronous update of all subsystems. `states` is `[i][k]`
    /// flattened (length `N * n`), `noises` `[i][k]` (length `N * m`).
    pub fn step(&self, t: usize, states: &[f64], noises: &[f64]) -> Result<Vec<f64>> {
        self.step_ctx(0, t, states, noises)
    }

    fn step_ctx(&self, rep: usize, t: usize, states: &[f64], noises: &[f64]) -> Result<Vec<f64>> {
        let n = self.spec.n_subsystems;
        let sd = self.spec.state_dim;
        let nd = self.spec.noise_dim;
        debug_assert_eq!(states.len(), n * sd);
        debug_assert_eq!(noises.len(), n * nd);
        if let Some(bad) = states.iter().position(|v| !v.is_finite()) {
            return Err(Error::Integration {
                replicate: rep,
                time: t,
                index: bad / sd,
            });
        }
        let mut out = vec![0.0; n * sd];
        for i in 0..n {
            let nb = &self.neighbors[i];
            let inv = 1.0 / nb.len() as f64;
            for k in 0..sd {
                let mut input = 0.0;
                for &j in nb {
                    input += states[j * sd + k];
                }
                input *= inv;
                let w = noises[i * nd + (k % nd)];
                out[i * sd + k] =
                    self.spec
                        .family
                        .apply(t, input, w, self.gains[i], self.thresholds[i]);
            }
        }
        Ok(out)
    }

    /// Integrate `replicates` independent trajectories for `t_steps` steps.
    /// Deterministic given `seed`; replicates use pre-split streams so
    /// execution order never affects output.
    pub fn simulate(&self, t_steps: usize, replicates: usize, seed: u64) -> Result<TrajectoryEnsemble> {
        if t_steps < 1 {
            return Err(Error::Config("t_steps must be at least 1".into()));
        }
        if replicates < 1 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        let n = self.spec.n_subsystems;
        let sd = self.spec.state_dim;
        let nd = self.spec.noise_dim;
        let state_block = n * sd;
        let noise_block = n * nd;

        let per_rep: Vec<Result<(Vec<f64>, Vec<f64>)>> = exec::map_indexed(replicates, |rep| {
            let mut rng = rng_for(sub_seed(seed, 0xF1E1D), rep as u64);
            let mut states = Vec::with_capacity((t_steps + 1) * state_block);
            let mut noises = Vec::with_capacity(t_steps * noise_block);
            let mut current = vec![0.0; state_block];
            match self.spec.init {
                InitDist::Delta0 => {}
                InitDist::Gaussian { mean, sigma } => {
                    for v in current.iter_mut() {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        *v = mean + sigma * z;
                    }
                }
            }
            states.extend_from_slice(&current);
            let mut noise_t = vec![0.0; noise_block];
            for t in 0..t_steps {
                // One correlated field per noise coordinate, drawn after the
                // state at time t is already fixed.
                let factor = self.spec.noise_modulation.factor(t);
                for k in 0..nd {
                    let field = self.sampler.sample(&mut rng);
                    for i in 0..n {
                        noise_t[i * nd + k] = factor * field[i];
                    }
                }
                noises.extend_from_slice(&noise_t);
                current = self.step_ctx(rep, t, &current, &noise_t)?;
                states.extend_from_slice(&current);
            }
            Ok((states, noises))
        });

        let mut states = Vec::with_capacity(replicates * (t_steps + 1) * state_block);
        let mut noises = Vec::with_capacity(replicates * t_steps * noise_block);
        for r in per_rep {
            let (s, w) = r?;
            states.extend_from_slice(&s);
            noises.extend_from_slice(&w);
        }
        Ok(TrajectoryEnsemble {
            states,
            noises,
            replicates,
            t_steps,
            n_subsystems: n,
            state_dim: sd,
            noise_dim: nd,
            seed,
        })
    }
}

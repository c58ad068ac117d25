//! Gaussianity testing for averaged samples: sup-CDF distances of every
//! marginal and of random unit-direction projections against a fitted
//! normal. Projections operationalize the Cramér–Wold reduction — a random
//! vector is Gaussian iff all its one-dimensional projections are.

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::seed::rng_for;
use crate::stats;

/// Distances and summary moments from a gaussianity test.
#[derive(Debug, Clone)]
pub struct GaussianityReport {
    /// Sup-CDF distance per dimension.
    pub marginal_distances: Vec<f64>,
    /// Sup-CDF distance per random projection direction.
    pub projection_distances: Vec<f64>,
    /// The projection directions used (rows of length dim).
    pub directions: Vec<Vec<f64>>,
    pub skewness: Vec<f64>,
    pub excess_kurtosis: Vec<f64>,
    /// Notes about skipped degenerate marginals/directions.
    pub skipped: Vec<String>,
    pub threshold: f64,
    pub pass: bool,
}

impl GaussianityReport {
    pub fn max_distance(&self) -> f64 {
        self.marginal_distances
            .iter()
            .chain(&self.projection_distances)
            .cloned()
            .fold(0.0, f64::max)
    }
}

/// Run the test on `samples` (replicate rows of dimension `dim`).
/// Requires at least 500 replicates; draws `n_projections` unit directions
/// from the seeded stream so pass/fail is reproducible. Degenerate
/// (zero-variance) marginals or directions are skipped with a note.
pub fn gaussianity_test(
    samples: &[Vec<f64>],
    threshold: f64,
    n_projections: usize,
    seed: u64,
) -> Result<GaussianityReport> {
    if samples.len() < 500 {
        return Err(Error::InsufficientReplicates {
            context: "gaussianity_test",
            needed: 500,
            got: samples.len(),
        });
    }
    if !(threshold > 0.0) {
        return Err(Error::Config("threshold must be positive".into()));
    }
    let dim = samples[0].len();
    let mut skipped = Vec::new();
    let mut marginal_distances = Vec::new();
    let mut skewness = Vec::new();
    let mut excess_kurtosis = Vec::new();
    for k in 0..dim {
        let col: Vec<f64> = samples.iter().map(|s| s[k]).collect();
        match stats::sup_cdf_distance_fitted_normal(&col) {
            Some(d) => {
                marginal_distances.push(d);
                skewness.push(stats::skewness(&col));
                excess_kurtosis.push(stats::excess_kurtosis(&col));
            }
            None => skipped.push(format!("marginal {k} degenerate (zero variance)")),
        }
    }

    let mut rng = rng_for(seed, 0xD12EC7);
    let mut directions = Vec::new();
    let mut projection_distances = Vec::new();
    while directions.len() < n_projections {
        let mut u: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        for x in u.iter_mut() {
            *x /= norm;
        }
        let proj: Vec<f64> = samples
            .iter()
            .map(|s| s.iter().zip(&u).map(|(a, b)| a * b).sum())
            .collect();
        match stats::sup_cdf_distance_fitted_normal(&proj) {
            Some(d) => projection_distances.push(d),
            None => skipped.push(format!(
                "projection {} degenerate (zero variance)",
                directions.len()
            )),
        }
        directions.push(u);
    }

    let pass = !marginal_distances.is_empty()
        && marginal_distances
            .iter()
            .chain(&projection_distances)
            .all(|d| *d < threshold);
    Ok(GaussianityReport {
        marginal_distances,
        projection_distances,
        directions,
        skewness,
        excess_kurtosis,
        skipped,
        threshold,
        pass,
    })
}

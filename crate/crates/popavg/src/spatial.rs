//! Spatial embedding of subsystems: homogeneous Poisson point layouts in a
//! ball window, ball counting, Euclidean neighborhoods, and the density
//! law `N_R / R^d -> lambda * C_v`.

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::seed::rng_for;
use crate::stats;

/// Default guard on the expected point count of a sampled layout.
pub const DEFAULT_COUNT_CAP: f64 = 2e7;

/// A set of subsystem locations inside a ball window of radius `window_radius`.
#[derive(Debug, Clone)]
pub struct SpatialLayout {
    dim: usize,
    positions: Vec<Vec<f64>>,
    intensity: Option<f64>,
    window_radius: f64,
    seed: u64,
}

/// Volume of the unit ball in `R^d`, via the recurrence
/// `C_v(d) = 2 pi / d * C_v(d-2)` with `C_v(1) = 2`, `C_v(2) = pi`.
pub fn unit_ball_volume(d: usize) -> f64 {
    assert!(d >= 1, "dimension must be at least 1");
    match d {
        1 => 2.0,
        2 => std::f64::consts::PI,
        _ => 2.0 * std::f64::consts::PI / d as f64 * unit_ball_volume(d - 2),
    }
}

/// Sample a homogeneous Poisson point process of rate `lambda` restricted
/// to the ball of radius `radius` in `R^d`. The total count is Poisson with
/// mean `lambda * C_v * radius^d`; given the count, points are uniform in
/// the ball (Gaussian direction, radius `R * U^{1/d}`), which is exact and
/// rejection-free in any dimension.
pub fn sample_poisson(lambda: f64, radius: f64, dim: usize, seed: u64) -> Result<SpatialLayout> {
    sample_poisson_capped(lambda, radius, dim, seed, DEFAULT_COUNT_CAP)
}

/// As [`sample_poisson`], with an explicit overflow guard on the expected count.
pub fn sample_poisson_capped(
    lambda: f64,
    radius: f64,
    dim: usize,
    seed: u64,
    count_cap: f64,
) -> Result<SpatialLayout> {
    if !(lambda > 0.0) {
        return Err(Error::Config(format!("intensity must be positive, got {lambda}")));
    }
    if !(radius > 0.0) {
        return Err(Error::Config(format!("window radius must be positive, got {radius}")));
    }
    if dim < 1 {
        return Err(Error::Config("dimension must be at least 1".into()));
    }
    let expected = lambda * unit_ball_volume(dim) * radius.powi(dim as i32);
    if expected > count_cap {
        return Err(Error::Config(format!(
            "expected point count {expected:.3e} exceeds cap {count_cap:.3e}"
        )));
    }
    let mut rng = rng_for(seed, 0);
    let count = Poisson::new(expected)
        .map_err(|e| Error::Config(format!("invalid Poisson mean {expected}: {e}")))?
        .sample(&mut rng) as usize;
    let mut positions = Vec::with_capacity(count);
    for _ in 0..count {
        positions.push(uniform_in_ball(&mut rng, dim, radius));
    }
    Ok(SpatialLayout {
        dim,
        positions,
        intensity: Some(lambda),
        window_radius: radius,
        seed,
    })
}

fn uniform_in_ball(rng: &mut rand_chacha::ChaCha8Rng, dim: usize, radius: f64) -> Vec<f64> {
    // Direction from a normalized Gaussian vector, radial CDF inversion.
    loop {
        let g: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            let u: f64 = rng.random();
            let r = radius * u.powf(1.0 / dim as f64);
            return g.iter().map(|x| x / norm * r).collect();
        }
    }
}

impl SpatialLayout {
    /// Wrap explicit positions (deterministic layouts, tests).
    pub fn from_positions(dim: usize, positions: Vec<Vec<f64>>, window_radius: f64) -> Result<Self> {
        if positions.iter().any(|p| p.len() != dim) {
            return Err(Error::Config("position dimension mismatch".into()));
        }
        if positions
            .iter()
            .any(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt() > window_radius + 1e-12)
        {
            return Err(Error::Config("position outside window radius".into()));
        }
        Ok(Self {
            dim,
            positions,
            intensity: None,
            window_radius,
            seed: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Vec<f64>] {
        &self.positions
    }

    pub fn intensity(&self) -> Option<f64> {
        self.intensity
    }

    pub fn window_radius(&self) -> f64 {
        self.window_radius
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn norm(&self, i: usize) -> f64 {
        self.positions[i].iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Number of points within distance `r` of the origin. Monotone
    /// nondecreasing in `r`; `r` beyond the window is an error.
    pub fn count_in_ball(&self, r: f64) -> Result<usize> {
        if r < 0.0 {
            return Err(Error::Config(format!("ball radius must be nonnegative, got {r}")));
        }
        if r > self.window_radius + 1e-12 {
            return Err(Error::OutOfWindow {
                radius: r,
                window: self.window_radius,
            });
        }
        Ok((0..self.len()).filter(|&i| self.norm(i) <= r).count())
    }

    /// Indices of points within distance `r` of the origin.
    pub fn indices_in_ball(&self, r: f64) -> Result<Vec<usize>> {
        if r > self.window_radius + 1e-12 {
            return Err(Error::OutOfWindow {
                radius: r,
                window: self.window_radius,
            });
        }
        Ok((0..self.len()).filter(|&i| self.norm(i) <= r).collect())
    }

    /// Symmetric adjacency under Euclidean range `tau`; every point
    /// neighbors itself.
    pub fn neighborhoods(&self, tau: f64) -> Result<Vec<Vec<usize>>> {
        if tau < 0.0 {
            return Err(Error::Config(format!("tau must be nonnegative, got {tau}")));
        }
        let n = self.len();
        let mut adj = vec![Vec::new(); n];
        for i in 0..n {
            adj[i].push(i);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let d: f64 = self.positions[i]
                    .iter()
                    .zip(&self.positions[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                if d <= tau {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        Ok(adj)
    }

    /// Export positions as CSV: `index,x0,x1,...`.
    pub fn to_csv<P: AsRef<std::path::Path>>(&self, path: P) -> Result<()> {
        let mut header = vec!["index".to_string()];
        header.extend((0..self.dim).map(|k| format!("x{k}")));
        let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
        crate::io::write_csv(
            path,
            &header_refs,
            self.positions.iter().enumerate().map(|(i, p)| {
                let mut row = vec![i as f64];
                row.extend_from_slice(p);
                row
            }),
        )
    }
}

/// Per-radius density ratios `N_R / (C_v R^d)` and their trend.
#[derive(Debug, Clone)]
pub struct DensityLawReport {
    pub radii: Vec<f64>,
    /// Mean ratio over the layouts observed at each radius.
    pub ratios: Vec<f64>,
    /// Ratio at the largest radius: the estimate of the intensity.
    pub limit_estimate: f64,
}

/// Check the Poisson density law on counts observed at growing radii.
/// Accepts `(radius, count)` observations — multiple observations per
/// radius are averaged — and needs at least 4 distinct radii.
pub fn density_law_from_counts(dim: usize, observations: &[(f64, usize)]) -> Result<DensityLawReport> {
    let mut by_radius: Vec<(f64, Vec<usize>)> = Vec::new();
    for &(r, c) in observations {
        match by_radius.iter_mut().find(|(radius, _)| (*radius - r).abs() < 1e-12) {
            Some((_, v)) => v.push(c),
            None => by_radius.push((r, vec![c])),
        }
    }
    by_radius.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    if by_radius.len() < 4 {
        return Err(Error::GridMismatch(format!(
            "density law needs at least 4 radii, got {}",
            by_radius.len()
        )));
    }
    let cv = unit_ball_volume(dim);
    let radii: Vec<f64> = by_radius.iter().map(|(r, _)| *r).collect();
    let ratios: Vec<f64> = by_radius
        .iter()
        .map(|(r, counts)| {
            let mean_count = stats::mean(&counts.iter().map(|&c| c as f64).collect::<Vec<_>>());
            mean_count / (cv * r.powi(dim as i32))
        })
        .collect();
    let limit_estimate = *ratios.last().expect("nonempty");
    Ok(DensityLawReport {
        radii,
        ratios,
        limit_estimate,
    })
}

/// Density law over whole layouts: each layout contributes its full count
/// at its own window radius.
pub fn density_law_check(layouts: &[SpatialLayout]) -> Result<DensityLawReport> {
    if layouts.is_empty() {
        return Err(Error::GridMismatch("no layouts supplied".into()));
    }
    let dim = layouts[0].dim;
    if layouts.iter().any(|l| l.dim != dim) {
        return Err(Error::GridMismatch("layout dimensions differ".into()));
    }
    let obs: Vec<(f64, usize)> = layouts
        .iter()
        .map(|l| (l.window_radius, l.len()))
        .collect();
    density_law_from_counts(dim, &obs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn unit_ball_volumes() {
        assert_relative_eq!(unit_ball_volume(1), 2.0);
        assert_relative_eq!(unit_ball_volume(2), std::f64::consts::PI);
        // d=3: 4 pi / 3 = 4.18879...
        assert_relative_eq!(unit_ball_volume(3), 4.0 * std::f64::consts::PI / 3.0, epsilon = 1e-14);
        assert_relative_eq!(unit_ball_volume(3), 4.188_790_204_786_391, epsilon = 1e-12);
        // Cross-check d=4 against pi^2/2.
        assert_relative_eq!(unit_ball_volume(4), std::f64::consts::PI.powi(2) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn poisson_mean_count_matches_oracle() {
        // lambda=5, d=2, R=10: mean count over 10^3 layouts vs 5 pi 100.
        let want = 5.0 * std::f64::consts::PI * 100.0;
        let mut total = 0usize;
        let layouts = 1000;
        for s in 0..layouts {
            total += sample_poisson(5.0, 10.0, 2, s).unwrap().len();
        }
        let mean_count = total as f64 / layouts as f64;
        assert!(
            (mean_count / want - 1.0).abs() < 0.02,
            "mean count {mean_count} vs {want}"
        );
    }

    #[test]
    fn one_dimensional_density() {
        // d=1, lambda=1, R=100: count/(2R) near 1.
        let mut ratios = Vec::new();
        for s in 0..50 {
            let l = sample_poisson(1.0, 100.0, 1, 1000 + s).unwrap();
            ratios.push(l.len() as f64 / 200.0);
        }
        let m = crate::stats::mean(&ratios);
        assert!((m - 1.0).abs() < 0.1, "mean ratio {m}");
    }

    #[test]
    fn count_cap_guard() {
        assert!(matches!(
            sample_poisson_capped(1e6, 1e4, 3, 0, 1e6),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn count_in_ball_contract() {
        let l = sample_poisson(2.0, 5.0, 2, 42).unwrap();
        assert_eq!(l.count_in_ball(5.0).unwrap(), l.len());
        assert_eq!(l.count_in_ball(0.0).unwrap(), 0);
        assert!(matches!(
            l.count_in_ball(6.0),
            Err(Error::OutOfWindow { .. })
        ));
    }

    proptest! {
        #[test]
        fn count_monotone_in_radius(seed in 0u64..500, r1 in 0.0f64..4.0, r2 in 0.0f64..4.0) {
            let l = sample_poisson(1.5, 4.0, 2, seed).unwrap();
            let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
            prop_assert!(l.count_in_ball(lo).unwrap() <= l.count_in_ball(hi).unwrap());
        }

        #[test]
        fn neighborhoods_symmetric_and_reflexive(seed in 0u64..200, tau in 0.0f64..2.0) {
            let l = sample_poisson(1.0, 3.0, 2, seed).unwrap();
            let adj = l.neighborhoods(tau).unwrap();
            for (i, row) in adj.iter().enumerate() {
                prop_assert!(row.contains(&i));
                for &j in row {
                    prop_assert!(adj[j].contains(&i));
                }
            }
        }
    }

    #[test]
    fn neighborhood_thresholds() {
        let l = SpatialLayout::from_positions(1, vec![vec![0.0], vec![1.0]], 2.0).unwrap();
        // tau = 0: identity adjacency.
        assert_eq!(l.neighborhoods(0.0).unwrap(), vec![vec![0], vec![1]]);
        // tau = 1: mutual neighbors at distance exactly 1.
        assert_eq!(l.neighborhoods(1.0).unwrap(), vec![vec![0, 1], vec![0, 1]]);
        // tau just below the distance: strict threshold.
        assert_eq!(l.neighborhoods(0.999).unwrap(), vec![vec![0], vec![1]]);
    }

    #[test]
    fn density_law_on_deterministic_lattice() {
        // Unit-density 2-d lattice restricted to balls: ratio tends to 1.
        let mut obs = Vec::new();
        for r in [8.0f64, 12.0, 16.0, 24.0] {
            let mut count = 0usize;
            let m = r.ceil() as i64;
            for i in -m..=m {
                for j in -m..=m {
                    // Offset half-integer lattice so no point sits on the boundary.
                    let (x, y) = (i as f64 + 0.5, j as f64 + 0.5);
                    if (x * x + y * y).sqrt() <= r {
                        count += 1;
                    }
                }
            }
            obs.push((r, count));
        }
        let rep = density_law_from_counts(2, &obs).unwrap();
        assert!(
            (rep.limit_estimate - 1.0).abs() < 0.05,
            "lattice ratio {}",
            rep.limit_estimate
        );
    }

    #[test]
    fn density_law_needs_four_radii() {
        let err = density_law_from_counts(2, &[(1.0, 3), (2.0, 12), (3.0, 28)]).unwrap_err();
        assert!(matches!(err, Error::GridMismatch(_)));
    }

    #[test]
    fn rotation_invariance_of_counts() {
        let l = sample_poisson(3.0, 4.0, 2, 7).unwrap();
        let theta: f64 = 0.7;
        let (c, s) = (theta.cos(), theta.sin());
        let rotated: Vec<Vec<f64>> = l
            .positions()
            .iter()
            .map(|p| vec![c * p[0] - s * p[1], s * p[0] + c * p[1]])
            .collect();
        let lr = SpatialLayout::from_positions(2, rotated, 4.0 + 1e-9).unwrap();
        for r in [1.0, 2.0, 3.0, 4.0] {
            assert_eq!(
                l.count_in_ball(r).unwrap(),
                lr.count_in_ball(r).unwrap(),
                "count differs after rotation at r={r}"
            );
        }
    }

    #[test]
    fn thinning_halves_intensity() {
        use rand::Rng;
        let mut kept_ratio = Vec::new();
        for s in 0..100 {
            let l = sample_poisson(4.0, 6.0, 2, 9000 + s).unwrap();
            let mut rng = crate::seed::rng_for(777, s);
            let kept = l
                .positions()
                .iter()
                .filter(|_| rng.random::<f64>() < 0.5)
                .count();
            kept_ratio.push(kept as f64 / (4.0 * unit_ball_volume(2) * 36.0));
        }
        let m = crate::stats::mean(&kept_ratio);
        assert!((m - 0.5 * 4.0 / 4.0).abs() < 0.05, "thinned intensity ratio {m}");
    }

    #[test]
    fn disjoint_annulus_counts_uncorrelated() {
        let reps = 200;
        let mut inner = Vec::new();
        let mut outer = Vec::new();
        for s in 0..reps {
            let l = sample_poisson(3.0, 6.0, 2, 31_000 + s).unwrap();
            let c2 = l.count_in_ball(2.0).unwrap();
            let c4 = l.count_in_ball(4.0).unwrap();
            let c6 = l.count_in_ball(6.0).unwrap();
            inner.push(c2 as f64);
            outer.push((c6 - c4) as f64);
        }
        let r = crate::stats::pearson(&inner, &outer).unwrap();
        assert!(
            r.abs() < 4.0 / (reps as f64).sqrt(),
            "annulus correlation {r}"
        );
    }
}

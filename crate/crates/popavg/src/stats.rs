//! Small shared statistics helpers: moments, correlation, least squares,
//! and the sup-CDF distance used by the gaussianity tests.

use statrs::distribution::{ContinuousCDF, Normal};

/// Sample mean. Returns 0 for empty input.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (n-1 denominator). Returns 0 for fewer than 2 points.
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64
}

/// Unbiased sample covariance.
pub fn covariance(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return 0.0;
    }
    let mx = mean(&xs[..n]);
    let my = mean(&ys[..n]);
    xs[..n]
        .iter()
        .zip(&ys[..n])
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / (n - 1) as f64
}

/// Pearson correlation. Returns `None` when either side has zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let vx = variance(xs);
    let vy = variance(ys);
    if vx <= 0.0 || vy <= 0.0 {
        return None;
    }
    Some(covariance(xs, ys) / (vx * vy).sqrt())
}

/// Sample skewness (biased, moment estimator).
pub fn skewness(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let n = xs.len() as f64;
    if n < 3.0 {
        return 0.0;
    }
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m3 = xs.iter().map(|x| (x - m).powi(3)).sum::<f64>() / n;
    if m2 <= 0.0 {
        return 0.0;
    }
    m3 / m2.powf(1.5)
}

/// Sample excess kurtosis (biased, moment estimator).
pub fn excess_kurtosis(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let n = xs.len() as f64;
    if n < 4.0 {
        return 0.0;
    }
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
    if m2 <= 0.0 {
        return 0.0;
    }
    m4 / (m2 * m2) - 3.0
}

/// Ordinary least squares `y = a + b x`; returns `(intercept, slope, r2, slope_se)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64, f64) {
    let n = xs.len().min(ys.len());
    assert!(n >= 2, "linear_fit needs at least 2 points");
    let mx = mean(&xs[..n]);
    let my = mean(&ys[..n]);
    let sxx: f64 = xs[..n].iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs[..n]
        .iter()
        .zip(&ys[..n])
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    let syy: f64 = ys[..n].iter().map(|y| (y - my) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_res: f64 = xs[..n]
        .iter()
        .zip(&ys[..n])
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    let slope_se = if n > 2 && sxx > 0.0 {
        (ss_res / (n as f64 - 2.0) / sxx).sqrt()
    } else {
        f64::INFINITY
    };
    (intercept, slope, r2, slope_se)
}

/// Sup-distance between the empirical CDF of `xs` and a normal fitted to
/// its own mean and standard deviation (Lilliefors-style statistic).
/// Returns `None` when the sample is degenerate.
pub fn sup_cdf_distance_fitted_normal(xs: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let m = mean(xs);
    let sd = variance(xs).sqrt();
    if !(sd > 0.0) {
        return None;
    }
    let normal = Normal::new(m, sd).ok()?;
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite sample"));
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let f = normal.cdf(*x);
        let hi = (i as f64 + 1.0) / nf - f;
        let lo = f - i as f64 / nf;
        d = d.max(hi).max(lo);
    }
    Some(d)
}

/// Cross-covariance matrix between replicate vectors `xs[r]` (dim p) and
/// `ys[r]` (dim q): a `p x q` matrix with the unbiased normalization.
pub fn cross_cov_matrix(xs: &[Vec<f64>], ys: &[Vec<f64>]) -> nalgebra::DMatrix<f64> {
    let n = xs.len().min(ys.len());
    assert!(n >= 2, "covariance needs at least 2 samples");
    let p = xs[0].len();
    let q = ys[0].len();
    let mut mx = vec![0.0; p];
    let mut my = vec![0.0; q];
    for r in 0..n {
        for (j, v) in xs[r].iter().enumerate() {
            mx[j] += v;
        }
        for (j, v) in ys[r].iter().enumerate() {
            my[j] += v;
        }
    }
    for v in mx.iter_mut() {
        *v /= n as f64;
    }
    for v in my.iter_mut() {
        *v /= n as f64;
    }
    let mut cov = nalgebra::DMatrix::zeros(p, q);
    for r in 0..n {
        for i in 0..p {
            let dx = xs[r][i] - mx[i];
            for j in 0..q {
                cov[(i, j)] += dx * (ys[r][j] - my[j]);
            }
        }
    }
    cov / (n as f64 - 1.0)
}

/// Covariance matrix of replicate vectors.
pub fn cov_matrix(samples: &[Vec<f64>]) -> nalgebra::DMatrix<f64> {
    cross_cov_matrix(samples, samples)
}

/// Standard normal CDF.
pub fn std_normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn moments_on_known_sample() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_relative_eq!(mean(&xs), 2.5);
        assert_relative_eq!(variance(&xs), 5.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn pearson_of_identical_series_is_one() {
        let xs = [0.3, -1.0, 2.5, 0.7, 0.0];
        assert_relative_eq!(pearson(&xs, &xs).unwrap(), 1.0, epsilon = 1e-12);
        assert!(pearson(&xs, &[1.0; 5]).is_none(), "constant side must be rejected");
    }

    #[test]
    fn linear_fit_recovers_exact_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 3.0 * x).collect();
        let (a, b, r2, se) = linear_fit(&xs, &ys);
        assert_relative_eq!(a, 2.0, epsilon = 1e-12);
        assert_relative_eq!(b, -3.0, epsilon = 1e-12);
        assert_relative_eq!(r2, 1.0, epsilon = 1e-12);
        assert!(se < 1e-9);
    }

    #[test]
    fn sup_cdf_distance_is_small_for_exact_gaussian_quantiles() {
        // Deterministic "perfect" normal sample via inverse CDF on a grid.
        use statrs::distribution::{ContinuousCDF, Normal};
        let normal = Normal::standard();
        let xs: Vec<f64> = (1..=2000)
            .map(|i| normal.inverse_cdf((i as f64 - 0.5) / 2000.0))
            .collect();
        let d = sup_cdf_distance_fitted_normal(&xs).unwrap();
        assert!(d < 0.01, "distance {d} too large for ideal sample");
    }
}

//! Normalized population averages, gaussianity (CLT) verification, and
//! limit-covariance estimation.

mod gaussian;
mod limitcov;
mod series;

pub use gaussian::{gaussianity_test, GaussianityReport};
pub use limitcov::{limit_covariance, LimitCovariance};
pub use series::{
    average_series, average_series_spatial, normalized_even_odd_sums, normalized_sums,
    AveragedSeries, Normalization,
};

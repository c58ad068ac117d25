//! Replicate-level execution strategy.
//!
//! Heavy loops in this crate are embarrassingly parallel across replicates
//! (or across grid sizes). `map_indexed` runs them on the rayon pool when
//! the `parallel` feature is enabled and falls back to a plain sequential
//! loop otherwise. Because every stream derives its own seed, both paths
//! produce bit-identical output; `map_indexed_seq` is always available so
//! benchmarks can compare the two.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n`, in parallel when the `parallel` feature is on.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sequential reference path, independent of feature flags.
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Human-readable name of the active execution strategy.
pub fn strategy() -> &'static str {
    if cfg!(feature = "parallel") {
        "rayon"
    } else {
        "sequential"
    }
}

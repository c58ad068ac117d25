//! Generators for sequences and fields of random variables with prescribed
//! correlation structure, spanning the full regime of residual-factor
//! growth laws: fast (summable) decay, boundary `c/n` decay, and slow
//! polynomial decay.

mod generate;
mod kernel;
mod sampler;

pub use generate::{gen_iid, gen_kernel_gaussian, gen_long_memory, gen_ma, IidDistribution, SampleMatrix};
pub use kernel::{
    fgn_autocovariance, inverse_lag_spectral_density, inverse_lag_spectral_min, ma_autocovariance,
    KernelKind, NoiseKernel, INVERSE_LAG_MAX_C,
};
pub use sampler::{FieldSampler, DENSE_FALLBACK_MAX};

//! Heterogeneous population dynamics `x_i(t+1) = f_i(x_{N_i}(t), w_i(t))`
//! over banded index neighborhoods or spatially embedded layouts.

mod family;
mod persist;
mod population;

pub use family::DynamicsFamily;
pub use persist::write_ensemble;
pub use population::{
    banded_neighborhoods, build_population, linear_reference_population, Heterogeneity, InitDist,
    LinearReference, NoiseModulation, Population, PopulationSpec, TrajectoryEnsemble,
};

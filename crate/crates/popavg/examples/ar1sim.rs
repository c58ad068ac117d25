use popavg::model::*;
use popavg::stochastic::{KernelKind, NoiseKernel};
use popavg::stats::{mean, variance};

fn main() {
    let pop = build_population(
        PopulationSpec {
            n_subsystems: 1, state_dim: 1, noise_dim: 1, tau: 0.0,
            family: DynamicsFamily::SaturatedLinear { gain: 0.9, bound: 100.0 },
            heterogeneity: Heterogeneity::none(),
            noise: NoiseKernel::new(KernelKind::Iid, 1.0).unwrap(),
            init: InitDist::Delta0,
            noise_modulation: NoiseModulation::None,
            seed: 7,
        },
        None,
    ).unwrap();
    let mut vars = Vec::new();
    for seed in 0..20u64 {
        let ens = pop.simulate(120, 4000, seed).unwrap();
        vars.push(variance(&ens.state_column(120, 0, 0)));
    }
    println!("vars: {:?}", vars.iter().map(|v| (v * 1000.0).round() / 1000.0).collect::<Vec<_>>());
    println!("mean {:.4} sd {:.4} (theory mean 5.255, sd 0.118)", mean(&vars), variance(&vars).sqrt());
}

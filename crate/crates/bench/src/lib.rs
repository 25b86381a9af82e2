//! Shared fixtures for the benchmark targets.

use matesim_core::model::{sim_rng, Population, SimParams, SimRng};

pub fn fig_scale_params(seed: u64) -> SimParams {
    SimParams {
        population_cap: 100,
        value_range: 9,
        meetings_per_generation: 20_000,
        max_generations: 1_000,
        seed,
    }
}

pub fn seeded_population(params: &SimParams) -> (Population, SimRng) {
    let mut rng = sim_rng(params.seed);
    let pop = Population::initialize(params, &mut rng).expect("valid params");
    (pop, rng)
}

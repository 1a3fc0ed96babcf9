//! Shared setup for the pipeline benchmarks: canned reservoirs, inputs, and
//! state matrices at the experiment's working sizes.

use deepesn::numerics::{DenseMatrix, DenseVector};
use deepesn::reservoir::{init_reservoir, run, DeepReservoir, LayerStates, ReservoirConfig};
use deepesn::rng::SplitMix64;

pub fn bench_reservoir(layers: usize, units: usize, seed: u64) -> DeepReservoir {
    init_reservoir(&ReservoirConfig {
        n_layers: layers,
        units_per_layer: units,
        input_dim: 1,
        spectral_radius: 0.9,
        input_scaling: 1.0,
        interlayer_scaling: 2.0,
        seed,
    })
    .expect("benchmark reservoir")
}

pub fn bench_inputs(len: usize, seed: u64) -> Vec<DenseVector> {
    let mut rng = SplitMix64::new(seed);
    (0..len)
        .map(|_| DenseVector::scalar(rng.next_range(0.0, 0.5)))
        .collect()
}

/// One driven layer of states at the experiment scale.
pub fn bench_states(units: usize, kept: usize, seed: u64) -> LayerStates {
    let reservoir = bench_reservoir(1, units, seed);
    let inputs = bench_inputs(kept + 50, seed ^ 0xDA7A);
    run(&reservoir, &inputs, 50).expect("benchmark run").remove(0)
}

pub fn bench_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut rng = SplitMix64::new(seed);
    let data = (0..rows * cols).map(|_| rng.next_symmetric()).collect();
    DenseMatrix::new(rows, cols, data).expect("benchmark matrix")
}

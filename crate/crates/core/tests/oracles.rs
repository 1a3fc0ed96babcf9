//! Cross-checks of the library numerics against independent oracles:
//! polynomial-root spectral radii, one-sided Jacobi singular values,
//! Gaussian-elimination least squares, and the naive entropy double sum.

mod common;

use std::sync::OnceLock;

use deepesn::measures::{average_state_entropy, condition_number, instantaneous_entropy, EntropyParams};
use deepesn::numerics::{
    least_squares_solve, operator_norm_2, singular_values, spectral_radius, symmetric_eigen,
    DenseVector,
};
use deepesn::reservoir::{init_reservoir, run, LayerStates, ReservoirConfig};
use deepesn::rng::SplitMix64;

#[test]
fn spectral_radius_matches_companion_roots_on_4x4() {
    let mut rng = SplitMix64::new(0xC0FFEE);
    for trial in 0..20 {
        let a = common::random_matrix(&mut rng, 4, 4);
        let expected = common::spectral_radius_oracle(&a);
        let got = spectral_radius(&a, 1e-8, 50_000).unwrap();
        assert!(
            (got - expected).abs() <= 1e-6 * expected.max(1e-12),
            "trial {trial}: {got} vs oracle {expected}"
        );
    }
}

#[test]
fn operator_norm_matches_gram_eigendecomposition() {
    let mut rng = SplitMix64::new(0xBEEF);
    for trial in 0..20 {
        let a = common::random_matrix(&mut rng, 5, 3);
        // Gram eigendecomposition oracle: largest eigenvalue of A^T A.
        let ata = a.transpose().gram();
        let (eigenvalues, _) = symmetric_eigen(&ata).unwrap();
        let expected = eigenvalues[0].max(0.0).sqrt();
        let got = operator_norm_2(&a, 1e-10, 50_000).unwrap();
        assert!(
            (got - expected).abs() <= 1e-8 * expected,
            "trial {trial}: {got} vs oracle {expected}"
        );
    }
}

#[test]
fn singular_values_match_one_sided_jacobi() {
    let mut rng = SplitMix64::new(0xFEED);
    for trial in 0..20 {
        let x = common::random_matrix(&mut rng, 4, 50);
        let got = singular_values(&x).unwrap();
        let expected = common::svd_singular_values_oracle(&x);
        for (g, e) in got.values().iter().zip(&expected) {
            if *e > 1e-10 {
                assert!(
                    (g - e).abs() <= 1e-8 * e,
                    "trial {trial}: {g} vs oracle {e}"
                );
            }
        }
    }
}

#[test]
fn least_squares_matches_elimination_on_normal_equations() {
    let mut rng = SplitMix64::new(0xABBA);
    for trial in 0..10 {
        let x = common::random_matrix(&mut rng, 5, 60);
        let y = common::random_matrix(&mut rng, 2, 60);
        let got = least_squares_solve(&x, &y, 0.0).unwrap();
        // Oracle: solve (X X^T) W^T = X Y^T by Gaussian elimination.
        let gram = x.gram();
        let rhs = x.matmul_transpose_b(&y).unwrap();
        let w_t = common::gaussian_solve(&gram, &rhs);
        let scale = w_t.max_abs().max(1.0);
        for r in 0..got.rows() {
            for c in 0..got.cols() {
                assert!(
                    (got.get(r, c) - w_t.get(c, r)).abs() <= 1e-8 * scale,
                    "trial {trial}: weight ({r},{c})"
                );
            }
        }
    }
}

#[test]
fn entropy_matches_naive_double_sum_bit_for_bit() {
    let params = EntropyParams::default();
    let mut rng = SplitMix64::new(0xE17);
    for _ in 0..50 {
        let data: Vec<f64> = (0..100).map(|_| rng.next_symmetric().tanh()).collect();
        let x = DenseVector::new(data.clone()).unwrap();
        let got = instantaneous_entropy(&x, &params).unwrap();
        let expected = common::naive_entropy(&data, params.shrink_factor, params.min_kernel_sigma);
        assert_eq!(got.to_bits(), expected.to_bits(), "entropy differs in bits");
    }
}

/// Shared 100-unit driven run for the state-matrix-scale oracle checks.
fn seeded_run() -> &'static Vec<LayerStates> {
    static RUN: OnceLock<Vec<LayerStates>> = OnceLock::new();
    RUN.get_or_init(|| {
        let cfg = ReservoirConfig {
            n_layers: 2,
            units_per_layer: 100,
            input_dim: 1,
            spectral_radius: 0.9,
            input_scaling: 1.0,
            interlayer_scaling: 2.0,
            seed: 20_19,
        };
        let reservoir = init_reservoir(&cfg).unwrap();
        let mut rng = SplitMix64::new(0xDA7A);
        let inputs: Vec<DenseVector> = (0..5000)
            .map(|_| DenseVector::scalar(rng.next_range(0.0, 0.5)))
            .collect();
        run(&reservoir, &inputs, 1000).unwrap()
    })
}

#[test]
fn ase_equals_mean_of_per_column_oracle() {
    let params = EntropyParams::default();
    let states = &seeded_run()[1];
    let got = average_state_entropy(states, &params).unwrap();
    let m = states.states();
    let mut col = vec![0.0; m.rows()];
    let mut sum = 0.0;
    for t in 0..m.cols() {
        m.copy_col_into(t, &mut col);
        sum += common::naive_entropy(&col, params.shrink_factor, params.min_kernel_sigma);
    }
    let expected = sum / m.cols() as f64;
    assert!(
        (got - expected).abs() <= 1e-10 * expected.abs().max(1.0),
        "{got} vs {expected}"
    );
}

#[test]
fn condition_number_matches_svd_oracle_on_driven_states() {
    let states = &seeded_run()[1];
    let (kappa, log10_kappa) = condition_number(states).unwrap();
    let oracle = common::svd_singular_values_oracle(states.states());
    let expected = oracle[0] / oracle[oracle.len() - 1];
    assert!(
        (kappa - expected).abs() <= 1e-6 * expected,
        "kappa {kappa} vs oracle {expected}"
    );
    assert!((log10_kappa - expected.log10()).abs() <= 1e-6);
}

//! Shared test oracles: independent reference implementations used to
//! cross-check the library numerics. Everything here is written from scratch
//! against textbook definitions and never calls the code paths under test;
//! the loops deliberately stay in plain index form to mirror those
//! definitions.

#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use std::path::Path;

use deepesn::numerics::DenseMatrix;
use deepesn::rng::SplitMix64;
use num_complex::Complex64;

pub fn random_matrix(rng: &mut SplitMix64, rows: usize, cols: usize) -> DenseMatrix {
    let data = (0..rows * cols).map(|_| rng.next_symmetric()).collect();
    DenseMatrix::new(rows, cols, data).unwrap()
}

/// Singular values of `x` (rows <= cols) by one-sided Jacobi orthogonalization
/// of the rows: no Gram matrix, no eigendecomposition.
pub fn svd_singular_values_oracle(x: &DenseMatrix) -> Vec<f64> {
    assert!(x.rows() <= x.cols());
    let n = x.rows();
    let mut vectors: Vec<Vec<f64>> = (0..n).map(|r| x.row(r).to_vec()).collect();

    for _sweep in 0..100 {
        let mut rotated = false;
        for i in 0..n.saturating_sub(1) {
            for j in (i + 1)..n {
                let (a, b, g) = {
                    let vi = &vectors[i];
                    let vj = &vectors[j];
                    let a: f64 = vi.iter().map(|v| v * v).sum();
                    let b: f64 = vj.iter().map(|v| v * v).sum();
                    let g: f64 = vi.iter().zip(vj).map(|(p, q)| p * q).sum();
                    (a, b, g)
                };
                if a == 0.0 || b == 0.0 || g.abs() <= 1e-15 * (a * b).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (b - a) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = vectors.split_at_mut(j);
                let vi = &mut left[i];
                let vj = &mut right[0];
                for k in 0..vi.len() {
                    let p = vi[k];
                    let q = vj[k];
                    vi[k] = c * p - s * q;
                    vj[k] = s * p + c * q;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut values: Vec<f64> = vectors
        .iter()
        .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    values.sort_by(|p, q| q.partial_cmp(p).unwrap());
    values
}

/// Monic characteristic polynomial coefficients of a square matrix,
/// descending powers (`[1, a_{n-1}, ..., a_0]`), by the Faddeev-LeVerrier
/// recursion.
pub fn characteristic_polynomial(a: &DenseMatrix) -> Vec<f64> {
    assert!(a.is_square());
    let n = a.rows();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[0] = 1.0;
    let mut b = a.clone();
    for k in 1..=n {
        let ak = -b.trace().unwrap() / k as f64;
        coeffs[k] = ak;
        if k == n {
            break;
        }
        let mut shifted = b.clone();
        for i in 0..n {
            shifted.set(i, i, shifted.get(i, i) + ak);
        }
        b = a.matmul(&shifted).unwrap();
    }
    coeffs
}

/// All roots of a real polynomial (monic, descending coefficients) by
/// Durand-Kerner iteration.
pub fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let degree = coeffs.len() - 1;
    assert!(degree >= 1);
    let eval = |z: Complex64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in coeffs {
            acc = acc * z + c;
        }
        acc
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..degree).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..1000 {
        let mut max_step = 0.0_f64;
        for k in 0..degree {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..degree {
                if j != k {
                    denom *= roots[k] - roots[j];
                }
            }
            let step = eval(roots[k]) / denom;
            roots[k] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step <= 1e-13 {
            break;
        }
    }
    roots
}

/// Spectral radius by characteristic polynomial root finding; the independent
/// reference for the power-iteration estimator.
pub fn spectral_radius_oracle(a: &DenseMatrix) -> f64 {
    let coeffs = characteristic_polynomial(a);
    polynomial_roots(&coeffs)
        .iter()
        .map(|r| r.norm())
        .fold(0.0, f64::max)
}

/// Solves `A X = B` (A square) by Gaussian elimination with partial pivoting.
pub fn gaussian_solve(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    assert!(a.is_square());
    assert_eq!(a.rows(), b.rows());
    let n = a.rows();
    let m = b.cols();
    let mut aug: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = a.row(i).to_vec();
            row.extend_from_slice(b.row(i));
            row
        })
        .collect();

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| aug[i][col].abs().partial_cmp(&aug[j][col].abs()).unwrap())
            .unwrap();
        aug.swap(col, pivot);
        let p = aug[col][col];
        assert!(p.abs() > 0.0, "singular system in oracle");
        for i in 0..n {
            if i == col {
                continue;
            }
            let factor = aug[i][col] / p;
            if factor == 0.0 {
                continue;
            }
            for k in col..n + m {
                aug[i][k] -= factor * aug[col][k];
            }
        }
    }
    DenseMatrix::from_fn(n, m, |i, j| aug[i][n + j] / aug[i][i])
}

/// Textbook evaluation of the kernel entropy estimator: nested double sum of
/// the normalized Gaussian kernel, kernel width from the shrunk population
/// standard deviation.
pub fn naive_entropy(x: &[f64], shrink: f64, min_sigma: f64) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let sigma = (shrink * var.sqrt()).max(min_sigma);
    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let denom = 2.0 * sigma * sigma;
    let mut total = 0.0;
    for j in 0..x.len() {
        let mut inner = 0.0;
        for i in 0..x.len() {
            let d = x[j] - x[i];
            inner += norm * (-(d * d) / denom).exp();
        }
        total += inner;
    }
    -((total / (n * n)).ln())
}

/// Matrix with orthonormal columns: Gram-Schmidt on uniform draws.
pub fn orthonormal_columns(rng: &mut SplitMix64, rows: usize, cols: usize) -> DenseMatrix {
    assert!(cols <= rows);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(cols);
    while basis.len() < cols {
        let mut v: Vec<f64> = (0..rows).map(|_| rng.next_symmetric()).collect();
        for b in &basis {
            let proj: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= proj * y;
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for x in v.iter_mut() {
                *x /= norm;
            }
            basis.push(v);
        }
    }
    DenseMatrix::from_fn(rows, cols, |r, c| basis[c][r])
}

/// Two-pass mean and population standard deviation.
pub fn two_pass_mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Writes a deterministic chaotic intensity series in the canonical laser
/// file format (one integer per line, 8-bit range): the x component of a
/// Lorenz-63 trajectory, quantized to 0..=255. Stands in for the laser
/// recording when no dataset file is available.
pub fn write_surrogate_laser(path: &Path, n_samples: usize) {
    let sigma = 10.0;
    let rho = 28.0;
    let beta = 8.0 / 3.0;
    let dt = 0.005;
    let deriv = |s: [f64; 3]| {
        [
            sigma * (s[1] - s[0]),
            s[0] * (rho - s[2]) - s[1],
            s[0] * s[1] - beta * s[2],
        ]
    };
    let rk4 = |s: [f64; 3]| {
        let k1 = deriv(s);
        let k2 = deriv([
            s[0] + 0.5 * dt * k1[0],
            s[1] + 0.5 * dt * k1[1],
            s[2] + 0.5 * dt * k1[2],
        ]);
        let k3 = deriv([
            s[0] + 0.5 * dt * k2[0],
            s[1] + 0.5 * dt * k2[1],
            s[2] + 0.5 * dt * k2[2],
        ]);
        let k4 = deriv([s[0] + dt * k3[0], s[1] + dt * k3[1], s[2] + dt * k3[2]]);
        [
            s[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            s[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            s[2] + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        ]
    };

    let mut state = [1.0, 1.0, 20.0];
    for _ in 0..2000 {
        state = rk4(state);
    }
    let mut out = String::with_capacity(n_samples * 4);
    for _ in 0..n_samples {
        for _ in 0..4 {
            state = rk4(state);
        }
        let level = (((state[0] + 20.0) / 40.0) * 255.0).round().clamp(0.0, 255.0);
        out.push_str(&format!("{}\n", level as i64));
    }
    std::fs::write(path, out).unwrap();
}

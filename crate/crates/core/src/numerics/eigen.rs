//! Symmetric eigendecomposition by cyclic Jacobi rotations, and singular
//! values of wide matrices via the Gram route.

use crate::error::{Error, Result};
use crate::numerics::matrix::{DenseMatrix, SingularSpectrum};

/// Maximum tolerated entry-wise asymmetry before the input is rejected.
pub const ASYMMETRY_TOL: f64 = 1e-10;
/// Convergence threshold: max off-diagonal magnitude relative to the
/// Frobenius norm of the (symmetrized) input.
const OFF_DIAG_REL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigendecomposition `S = V diag(values) V^T` of a symmetric matrix.
/// Eigenvalues are sorted non-increasing; column `k` of `V` is the
/// eigenvector for `values[k]`.
pub fn symmetric_eigen(s: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    if !s.is_square() {
        return Err(Error::Dimension(format!(
            "symmetric eigendecomposition of a {}x{} matrix",
            s.rows(),
            s.cols()
        )));
    }
    let n = s.rows();
    let mut max_asym = 0.0_f64;
    for i in 0..n {
        for j in (i + 1)..n {
            max_asym = max_asym.max((s.get(i, j) - s.get(j, i)).abs());
        }
    }
    if max_asym > ASYMMETRY_TOL {
        return Err(Error::Asymmetric {
            max_asymmetry: max_asym,
            tolerance: ASYMMETRY_TOL,
        });
    }

    // Work on the symmetrized copy (S + S^T) / 2.
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (s.get(i, j) + s.get(j, i));
        }
    }
    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let off_tol = OFF_DIAG_REL_TOL * frob;

    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let mut off_max = 0.0_f64;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                off_max = off_max.max(a[p * n + q].abs());
            }
        }
        if off_max <= off_tol {
            converged = true;
            break;
        }

        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                // Stable tangent of the rotation angle; falls back to the
                // small-angle form when theta overflows.
                let t = if theta.is_finite() {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (theta * theta + 1.0).sqrt())
                } else {
                    0.5 / theta
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s_rot = t * c;
                let tau = s_rot / (1.0 + c);

                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    let new_rp = arp - s_rot * (arq + tau * arp);
                    let new_rq = arq + s_rot * (arp - tau * arq);
                    a[r * n + p] = new_rp;
                    a[p * n + r] = new_rp;
                    a[r * n + q] = new_rq;
                    a[q * n + r] = new_rq;
                }
                for r in 0..n {
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + q];
                    v[r * n + p] = vrp - s_rot * (vrq + tau * vrp);
                    v[r * n + q] = vrq + s_rot * (vrp - tau * vrq);
                }
            }
        }
    }
    if !converged {
        // One final check: the last sweep may have finished the job.
        let mut off_max = 0.0_f64;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                off_max = off_max.max(a[p * n + q].abs());
            }
        }
        if off_max > off_tol {
            return Err(Error::EigenNoConvergence(MAX_SWEEPS));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[j * n + j]
            .partial_cmp(&a[i * n + i])
            .expect("eigenvalues are finite")
    });
    let values: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |r, c| v[r * n + order[c]]);
    Ok((values, vectors))
}

/// Singular values of a wide matrix (`rows <= cols`), computed as the square
/// roots of the eigenvalues of `X X^T`. Negative eigenvalues (numerical noise
/// on a PSD matrix) are clamped to zero before the square root.
pub fn singular_values(x: &DenseMatrix) -> Result<SingularSpectrum> {
    if x.rows() > x.cols() {
        return Err(Error::Dimension(format!(
            "singular_values expects rows <= cols, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    let gram = x.gram();
    let (eigenvalues, _) = symmetric_eigen(&gram)?;
    let values = eigenvalues
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    Ok(SingularSpectrum::from_sorted(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mat(n: usize, data: &[f64]) -> DenseMatrix {
        DenseMatrix::new(n, n, data.to_vec()).unwrap()
    }

    #[test]
    fn diagonal_eigenvalues_sorted() {
        let d = mat(3, &[3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]);
        let (vals, _) = symmetric_eigen(&d).unwrap();
        assert_eq!(vals, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn exchange_matrix_eigenvalues() {
        let e = mat(2, &[0.0, 1.0, 1.0, 0.0]);
        let (vals, v) = symmetric_eigen(&e).unwrap();
        assert_relative_eq!(vals[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(vals[1], -1.0, max_relative = 1e-12);
        // V columns orthonormal.
        let vtv = v.transpose().matmul(&v).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(vtv.get(i, j), expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn reconstructs_random_symmetric() {
        let mut rng = crate::rng::SplitMix64::new(11);
        let n = 6;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let x = rng.next_symmetric();
                data[i * n + j] = x;
                data[j * n + i] = x;
            }
        }
        let s = mat(n, &data);
        let (vals, v) = symmetric_eigen(&s).unwrap();
        // S ~ V diag(vals) V^T, entry-wise within 1e-8 * ||S||_2 (bounded by
        // the largest eigenvalue magnitude).
        let scale = vals.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        for i in 0..n {
            for j in 0..n {
                let mut rec = 0.0;
                for (k, &val) in vals.iter().enumerate() {
                    rec += v.get(i, k) * val * v.get(j, k);
                }
                assert!(
                    (rec - s.get(i, j)).abs() <= 1e-8 * scale,
                    "entry ({i},{j}): {rec} vs {}",
                    s.get(i, j)
                );
            }
        }
        // Eigenvalue sum equals the trace.
        let sum: f64 = vals.iter().sum();
        assert!((sum - s.trace().unwrap()).abs() <= 1e-10 * scale.max(1.0));
    }

    #[test]
    fn rejects_asymmetric_and_non_square() {
        let a = mat(2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(
            symmetric_eigen(&a),
            Err(Error::Asymmetric { .. })
        ));
        let r = DenseMatrix::new(2, 3, vec![0.0; 6]).unwrap();
        assert!(matches!(symmetric_eigen(&r), Err(Error::Dimension(_))));
    }

    #[test]
    fn tolerates_tiny_asymmetry() {
        let a = mat(2, &[1.0, 0.5 + 1e-12, 0.5, 1.0]);
        let (vals, _) = symmetric_eigen(&a).unwrap();
        assert_relative_eq!(vals[0], 1.5, max_relative = 1e-10);
        assert_relative_eq!(vals[1], 0.5, max_relative = 1e-10);
    }

    #[test]
    fn singular_values_of_rank_one_rows() {
        let x = DenseMatrix::new(2, 4, vec![1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let sv = singular_values(&x).unwrap();
        assert_relative_eq!(sv.values()[0], 2.0, max_relative = 1e-12);
        assert!(sv.values()[1].abs() <= 1e-12);
    }

    #[test]
    fn orthonormal_rows_have_unit_singular_values() {
        let h = 0.5_f64.sqrt();
        let x = DenseMatrix::new(2, 4, vec![h, h, 0.0, 0.0, 0.0, 0.0, h, h]).unwrap();
        let sv = singular_values(&x).unwrap();
        for &v in sv.values() {
            assert_relative_eq!(v, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn tall_matrix_rejected() {
        let x = DenseMatrix::new(4, 2, vec![0.0; 8]).unwrap();
        assert!(matches!(singular_values(&x), Err(Error::Dimension(_))));
    }

    #[test]
    fn zero_matrix_spectrum() {
        let x = DenseMatrix::zeros(2, 5);
        let sv = singular_values(&x).unwrap();
        assert_eq!(sv.values(), &[0.0, 0.0]);
    }
}

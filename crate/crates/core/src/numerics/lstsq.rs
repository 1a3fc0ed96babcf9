//! Least-squares readout solver over the Gram eigendecomposition.

use crate::error::{Error, Result};
use crate::numerics::eigen::symmetric_eigen;
use crate::numerics::matrix::DenseMatrix;

/// Relative eigenvalue cutoff applied when `ridge == 0`: Gram eigenvalues
/// below `RANK_CUTOFF * lambda_max` are treated as zero (pseudoinverse).
pub const RANK_CUTOFF: f64 = 1e-12;

/// Solves `min_W ||W X - Y||^2 + ridge ||W||^2` for `W` (shape
/// `Y.rows() x X.rows()`) via the eigendecomposition of `X X^T + ridge I`.
pub fn least_squares_solve(x: &DenseMatrix, y: &DenseMatrix, ridge: f64) -> Result<DenseMatrix> {
    if x.cols() != y.cols() {
        return Err(Error::Dimension(format!(
            "least_squares_solve: X has {} columns, Y has {}",
            x.cols(),
            y.cols()
        )));
    }
    let ridge_ok = ridge.is_finite() && ridge >= 0.0;
    if !ridge_ok {
        return Err(Error::InvalidArgument(format!(
            "ridge must be finite and non-negative, got {ridge}"
        )));
    }

    let mut gram = x.gram();
    if ridge > 0.0 {
        let n = gram.rows();
        for i in 0..n {
            gram.set(i, i, gram.get(i, i) + ridge);
        }
    }
    let (eigenvalues, v) = symmetric_eigen(&gram)?;

    let inv: Vec<f64> = if ridge > 0.0 {
        // Strictly positive spectrum: plain inverse.
        eigenvalues.iter().map(|&l| 1.0 / l).collect()
    } else {
        let lambda_max = eigenvalues[0];
        if lambda_max <= 0.0 {
            return Err(Error::DegenerateSystem);
        }
        let cutoff = RANK_CUTOFF * lambda_max;
        let inv: Vec<f64> = eigenvalues
            .iter()
            .map(|&l| if l >= cutoff { 1.0 / l } else { 0.0 })
            .collect();
        if inv.iter().all(|&i| i == 0.0) {
            return Err(Error::DegenerateSystem);
        }
        inv
    };

    // W = (Y X^T) V diag(inv) V^T
    let b = y.matmul_transpose_b(x)?;
    let mut m = b.matmul(&v)?;
    for r in 0..m.rows() {
        for (c, &s) in inv.iter().enumerate() {
            m.set(r, c, m.get(r, c) * s);
        }
    }
    m.matmul_transpose_b(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_states_return_targets() {
        let x = DenseMatrix::identity(3);
        let y = DenseMatrix::new(1, 3, vec![2.0, -1.0, 0.5]).unwrap();
        let w = least_squares_solve(&x, &y, 0.0).unwrap();
        for c in 0..3 {
            assert_relative_eq!(w.get(0, c), y.get(0, c), max_relative = 1e-10);
        }
    }

    #[test]
    fn diagonal_system_decouples() {
        let x = DenseMatrix::new(2, 2, vec![2.0, 0.0, 0.0, 4.0]).unwrap();
        let y = DenseMatrix::new(1, 2, vec![2.0, 4.0]).unwrap();
        let w = least_squares_solve(&x, &y, 0.0).unwrap();
        assert_relative_eq!(w.get(0, 0), 1.0, max_relative = 1e-10);
        assert_relative_eq!(w.get(0, 1), 1.0, max_relative = 1e-10);
    }

    #[test]
    fn residual_gradient_vanishes_on_overdetermined_system() {
        let mut rng = crate::rng::SplitMix64::new(5);
        let x = DenseMatrix::from_fn(4, 40, |_, _| rng.next_symmetric());
        let y = DenseMatrix::from_fn(2, 40, |_, _| rng.next_symmetric());
        let w = least_squares_solve(&x, &y, 0.0).unwrap();
        // Gradient of the objective: 2 (W X - Y) X^T.
        let resid_grad = w
            .matmul(&x)
            .unwrap()
            .matmul_transpose_b(&x)
            .unwrap();
        let yxt = y.matmul_transpose_b(&x).unwrap();
        let scale = y.frobenius_norm() * x.frobenius_norm();
        for r in 0..2 {
            for c in 0..4 {
                assert!(
                    (resid_grad.get(r, c) - yxt.get(r, c)).abs() <= 1e-6 * scale,
                    "gradient entry ({r},{c}) too large"
                );
            }
        }
    }

    #[test]
    fn huge_ridge_shrinks_weights() {
        let mut rng = crate::rng::SplitMix64::new(6);
        let x = DenseMatrix::from_fn(3, 20, |_, _| rng.next_symmetric());
        let y = DenseMatrix::from_fn(1, 20, |_, _| rng.next_symmetric());
        let w = least_squares_solve(&x, &y, 1e12).unwrap();
        assert!(w.max_abs() <= 1e-6);
    }

    #[test]
    fn mismatched_columns_rejected() {
        let x = DenseMatrix::zeros(2, 5);
        let y = DenseMatrix::zeros(1, 4);
        assert!(matches!(
            least_squares_solve(&x, &y, 0.0),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn all_zero_states_degenerate_at_zero_ridge() {
        let x = DenseMatrix::zeros(3, 6);
        let y = DenseMatrix::new(1, 6, vec![1.0; 6]).unwrap();
        assert!(matches!(
            least_squares_solve(&x, &y, 0.0),
            Err(Error::DegenerateSystem)
        ));
    }

    #[test]
    fn negative_ridge_rejected() {
        let x = DenseMatrix::identity(2);
        let y = DenseMatrix::zeros(1, 2);
        assert!(matches!(
            least_squares_solve(&x, &y, -1.0),
            Err(Error::InvalidArgument(_))
        ));
    }
}

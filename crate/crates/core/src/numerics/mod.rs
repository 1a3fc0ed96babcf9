//! In-repo dense linear algebra: the matrix substrate plus the estimators and
//! solvers everything else consumes. No external linear-algebra backend; the
//! algorithms are small, deterministic, and sized for matrices on the order
//! of hundreds of rows.

mod eigen;
mod iterative;
mod lstsq;
mod matrix;

pub use eigen::{singular_values, symmetric_eigen, ASYMMETRY_TOL};
pub use iterative::{operator_norm_2, spectral_radius, DEFAULT_MAX_ITER, DEFAULT_TOL};
pub use lstsq::{least_squares_solve, RANK_CUTOFF};
pub use matrix::{DenseMatrix, DenseVector, SingularSpectrum};

//! Deep echo state networks with per-layer richness analysis.
//!
//! A deep echo state network stacks fixed (untrained) recurrent layers: the
//! external input drives only the first layer and each layer's state feeds
//! the next. This crate builds and runs such reservoirs, quantifies how rich
//! the state trajectory of each layer is (average state entropy, number of
//! uncoupled dynamics, condition number of the state matrix), and trains
//! per-layer linear readouts either directly (least squares) or iteratively
//! (least mean squares).
//!
//! The crate is organized around the experiment pipeline:
//!
//! * [`numerics`]: dense matrices plus the in-repo estimators and solvers
//!   (spectral radius, operator 2-norm, Jacobi eigendecomposition, singular
//!   values, least squares);
//! * [`reservoir`]: construction and execution of the layered reservoir;
//! * [`measures`]: the three per-layer richness measures;
//! * [`readout`]: direct and LMS readout training, prediction, MSE;
//! * [`data`]: benchmark tasks: NARMA-10 generation and laser-series
//!   ingestion with next-step targets;
//! * [`experiment`]: seeded multi-realization sweeps aggregated into CSV
//!   tables.
//!
//! Everything is deterministic given the seeds: random draws flow through the
//! documented generator in [`rng`], and parallel sweeps merge results in a
//! canonical order, so repeated runs produce byte-identical output.

pub mod data;
pub mod error;
pub mod experiment;
pub mod measures;
pub mod numerics;
pub mod readout;
pub mod reservoir;
pub mod rng;

pub use error::{Error, Result};
pub use numerics::{DenseMatrix, DenseVector, SingularSpectrum};
pub use reservoir::{DeepReservoir, LayerStates, ReservoirConfig};

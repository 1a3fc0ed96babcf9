//! Per-layer linear readouts: direct least-squares training, iterative LMS
//! training, prediction, and MSE evaluation.
//!
//! The readout maps a layer state to the output, `y(t) = W x(t)`. Direct
//! training solves the regression in one shot; LMS sweeps the kept columns in
//! chronological order (no shuffling), updating after every sample with a
//! fixed learning rate from zero initial weights, and records the full-pass
//! MSE after each epoch. There is no bias unit by default; the `bias`
//! variants augment the states with a constant row instead.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::numerics::{least_squares_solve, DenseMatrix};
use crate::reservoir::LayerStates;

/// Epoch MSE above this (or any non-finite value) aborts LMS training with a
/// divergence error carrying the trace.
pub const LMS_DIVERGENCE_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainMethod {
    Direct,
    Lms,
}

/// Trained readout weights for one layer.
#[derive(Debug, Clone)]
pub struct Readout {
    weights: DenseMatrix,
    trained_on_layer: usize,
    method: TrainMethod,
    has_bias: bool,
}

impl Readout {
    /// `outputs x units` weight matrix (`units + 1` columns when trained with
    /// a bias row).
    pub fn weights(&self) -> &DenseMatrix {
        &self.weights
    }

    pub fn trained_on_layer(&self) -> usize {
        self.trained_on_layer
    }

    pub fn method(&self) -> TrainMethod {
        self.method
    }

    pub fn has_bias(&self) -> bool {
        self.has_bias
    }
}

/// LMS hyperparameters. Weights always start at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LmsParams {
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for LmsParams {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            epochs: 5000,
        }
    }
}

impl LmsParams {
    fn validate(&self) -> Result<()> {
        let eta_ok = self.learning_rate.is_finite() && self.learning_rate > 0.0;
        if !eta_ok {
            return Err(Error::InvalidArgument(format!(
                "learning rate must be positive and finite, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidArgument("epochs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Full-pass MSE after each LMS epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct LossTrace {
    pub per_epoch_mse: Vec<f64>,
}

impl LossTrace {
    /// Writes `epoch,mse` rows (1-based epochs) for convergence inspection.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let io_err = |source| Error::Io {
            path: path.display().to_string(),
            source,
        };
        let mut out = Vec::new();
        writeln!(out, "epoch,mse").map_err(io_err)?;
        for (i, mse) in self.per_epoch_mse.iter().enumerate() {
            writeln!(out, "{},{:e}", i + 1, mse).map_err(io_err)?;
        }
        std::fs::write(path, out).map_err(io_err)
    }
}

fn check_targets(s: &LayerStates, targets: &DenseMatrix) -> Result<()> {
    if targets.cols() != s.kept() {
        return Err(Error::Dimension(format!(
            "targets have {} columns but the layer kept {}",
            targets.cols(),
            s.kept()
        )));
    }
    Ok(())
}

fn augmented(states: &DenseMatrix) -> DenseMatrix {
    DenseMatrix::from_fn(states.rows() + 1, states.cols(), |r, c| {
        if r < states.rows() {
            states.get(r, c)
        } else {
            1.0
        }
    })
}

/// Direct least-squares training of the readout on the kept columns.
pub fn train_direct(s: &LayerStates, targets: &DenseMatrix, ridge: f64) -> Result<Readout> {
    train_direct_opts(s, targets, ridge, false)
}

/// Direct training with an optional constant bias row appended to the states.
pub fn train_direct_opts(
    s: &LayerStates,
    targets: &DenseMatrix,
    ridge: f64,
    bias: bool,
) -> Result<Readout> {
    check_targets(s, targets)?;
    let weights = if bias {
        least_squares_solve(&augmented(s.states()), targets, ridge)?
    } else {
        least_squares_solve(s.states(), targets, ridge)?
    };
    Ok(Readout {
        weights,
        trained_on_layer: s.layer_index(),
        method: TrainMethod::Direct,
        has_bias: bias,
    })
}

/// LMS training: chronological per-sample updates
/// `W <- W + eta (y_tg(t) - W x(t)) x(t)^T`, repeated for `params.epochs`
/// passes, with the full-pass MSE recorded after every epoch.
pub fn train_lms(
    s: &LayerStates,
    targets: &DenseMatrix,
    params: &LmsParams,
) -> Result<(Readout, LossTrace)> {
    train_lms_opts(s, targets, params, false)
}

/// LMS training with an optional constant bias row appended to the states.
pub fn train_lms_opts(
    s: &LayerStates,
    targets: &DenseMatrix,
    params: &LmsParams,
    bias: bool,
) -> Result<(Readout, LossTrace)> {
    check_targets(s, targets)?;
    params.validate()?;

    let states;
    let states_ref = if bias {
        states = augmented(s.states());
        &states
    } else {
        s.states()
    };
    let n_units = states_ref.rows();
    let n_out = targets.rows();
    let t_kept = states_ref.cols();
    let eta = params.learning_rate;

    // Column-major copy of the states so each sample is one contiguous slice.
    let mut samples = vec![0.0; t_kept * n_units];
    for t in 0..t_kept {
        for r in 0..n_units {
            samples[t * n_units + r] = states_ref.get(r, t);
        }
    }
    let mut sample_targets = vec![0.0; t_kept * n_out];
    for t in 0..t_kept {
        for r in 0..n_out {
            sample_targets[t * n_out + r] = targets.get(r, t);
        }
    }

    let mut w = vec![0.0; n_out * n_units];
    let mut trace = Vec::with_capacity(params.epochs);
    for epoch in 1..=params.epochs {
        for t in 0..t_kept {
            let x = &samples[t * n_units..(t + 1) * n_units];
            let y_tg = &sample_targets[t * n_out..(t + 1) * n_out];
            for (k, &target) in y_tg.iter().enumerate() {
                let row = &mut w[k * n_units..(k + 1) * n_units];
                let pred: f64 = row.iter().zip(x).map(|(wi, xi)| wi * xi).sum();
                let step = eta * (target - pred);
                for (wi, &xi) in row.iter_mut().zip(x) {
                    *wi += step * xi;
                }
            }
        }

        // Full pass with the epoch-final weights.
        let mut sq_sum = 0.0;
        for t in 0..t_kept {
            let x = &samples[t * n_units..(t + 1) * n_units];
            let y_tg = &sample_targets[t * n_out..(t + 1) * n_out];
            for (k, &target) in y_tg.iter().enumerate() {
                let row = &w[k * n_units..(k + 1) * n_units];
                let pred: f64 = row.iter().zip(x).map(|(wi, xi)| wi * xi).sum();
                let e = target - pred;
                sq_sum += e * e;
            }
        }
        let mse = sq_sum / (t_kept * n_out) as f64;
        trace.push(mse);
        if !mse.is_finite() || mse > LMS_DIVERGENCE_LIMIT {
            return Err(Error::LmsDiverged {
                epoch,
                last_mse: mse,
                trace,
            });
        }
    }

    let weights = DenseMatrix::new(n_out, n_units, w)?;
    Ok((
        Readout {
            weights,
            trained_on_layer: s.layer_index(),
            method: TrainMethod::Lms,
            has_bias: bias,
        },
        LossTrace {
            per_epoch_mse: trace,
        },
    ))
}

/// Applies the readout column-wise: `outputs x kept` predictions.
pub fn predict(r: &Readout, s: &LayerStates) -> Result<DenseMatrix> {
    if r.has_bias {
        r.weights.matmul(&augmented(s.states()))
    } else {
        r.weights.matmul(s.states())
    }
}

/// Mean over all entries of the squared error.
pub fn mse(pred: &DenseMatrix, targets: &DenseMatrix) -> Result<f64> {
    if pred.rows() != targets.rows() || pred.cols() != targets.cols() {
        return Err(Error::Dimension(format!(
            "mse of a {}x{} prediction against {}x{} targets",
            pred.rows(),
            pred.cols(),
            targets.rows(),
            targets.cols()
        )));
    }
    let sq_sum: f64 = pred
        .data()
        .iter()
        .zip(targets.data())
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok(sq_sum / pred.data().len() as f64)
}

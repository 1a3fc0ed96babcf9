//! Construction, initialization, and execution of the layered reservoir.
//!
//! The reservoir is a feedforward stack of `L` recurrent tanh layers. The
//! input drives layer 1 only; layer `l > 1` is driven by the freshly computed
//! state of layer `l - 1` at the same time step:
//!
//! ```text
//! x_1(t) = tanh(W_in u(t)      + Wrec_1 x_1(t-1))
//! x_l(t) = tanh(W_l  x_{l-1}(t) + Wrec_l x_l(t-1))    l = 2..L
//! ```
//!
//! All weights are drawn entry-wise i.i.d. uniform on [-1, 1) from per-matrix
//! substreams and then rescaled so that `||W_in||_2 = omega_in`,
//! `||W_l||_2 = omega_il`, and `rho(Wrec_l) = rho`. Because every matrix owns
//! its own substream keyed by role and layer, changing the layer count or the
//! inter-layer scaling never alters the draws of the other matrices.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{operator_norm_2, spectral_radius, DenseMatrix, DenseVector};
use crate::rng::{derive_stream, SplitMix64};

/// Tolerance used when measuring draws for rescaling; tight enough to keep
/// the 1e-6 construction invariants with margin.
const RESCALE_TOL: f64 = 1e-8;
const RESCALE_MAX_ITER: usize = 100_000;

/// Substream tags for weight draws; part of the reproducibility contract.
const STREAM_INPUT: u64 = 1;
const STREAM_RECURRENT: u64 = 2;
const STREAM_INTER_LAYER: u64 = 3;
/// Added to a role tag for the single permitted redraw of a zero-magnitude
/// draw (probability zero with dense uniform entries, but defined behavior).
const STREAM_REDRAW_OFFSET: u64 = 0x100;

/// Hyperparameters of a layered reservoir.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReservoirConfig {
    /// Number of stacked recurrent layers (L >= 1).
    pub n_layers: usize,
    /// Units per layer (each layer has the same size).
    pub units_per_layer: usize,
    /// External input dimension.
    pub input_dim: usize,
    /// Spectral radius of every recurrent matrix.
    pub spectral_radius: f64,
    /// Operator 2-norm of the input matrix.
    pub input_scaling: f64,
    /// Operator 2-norm of every inter-layer matrix (shared across layers).
    pub interlayer_scaling: f64,
    /// Seed for the per-matrix draw substreams.
    pub seed: u64,
}

impl ReservoirConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_layers == 0 || self.units_per_layer == 0 || self.input_dim == 0 {
            return Err(Error::InvalidConfig(format!(
                "layer count, units, and input dim must be positive (got {}, {}, {})",
                self.n_layers, self.units_per_layer, self.input_dim
            )));
        }
        for (name, v) in [
            ("spectral_radius", self.spectral_radius),
            ("input_scaling", self.input_scaling),
            ("interlayer_scaling", self.interlayer_scaling),
        ] {
            let ok = v.is_finite() && v > 0.0;
            if !ok {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// A frozen deep reservoir: the input matrix, one recurrent matrix per layer,
/// and one inter-layer matrix per layer boundary. Immutable after
/// construction and safe to share across threads.
#[derive(Debug, Clone)]
pub struct DeepReservoir {
    config: ReservoirConfig,
    w_in: DenseMatrix,
    w_inter: Vec<DenseMatrix>,
    w_rec: Vec<DenseMatrix>,
}

impl DeepReservoir {
    pub fn config(&self) -> &ReservoirConfig {
        &self.config
    }

    pub fn n_layers(&self) -> usize {
        self.config.n_layers
    }

    /// Input matrix, `units x input_dim`.
    pub fn w_in(&self) -> &DenseMatrix {
        &self.w_in
    }

    /// Inter-layer matrices; `w_inter()[l - 2]` connects layer `l - 1` to
    /// layer `l`.
    pub fn w_inter(&self) -> &[DenseMatrix] {
        &self.w_inter
    }

    /// Recurrent matrices, one per layer.
    pub fn w_rec(&self) -> &[DenseMatrix] {
        &self.w_rec
    }

    /// Dumps every weight matrix to `dir` as row-major CSV, one matrix per
    /// file (`w_in.csv`, `w_rec_<l>.csv`, `w_inter_<l>.csv`).
    pub fn dump_weights_csv(&self, dir: &Path) -> Result<()> {
        write_matrix_csv(&self.w_in, &dir.join("w_in.csv"))?;
        for (i, m) in self.w_rec.iter().enumerate() {
            write_matrix_csv(m, &dir.join(format!("w_rec_{}.csv", i + 1)))?;
        }
        for (i, m) in self.w_inter.iter().enumerate() {
            write_matrix_csv(m, &dir.join(format!("w_inter_{}.csv", i + 2)))?;
        }
        Ok(())
    }
}

fn write_matrix_csv(m: &DenseMatrix, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let mut out = Vec::new();
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(|x| format!("{x:e}")).collect();
        writeln!(out, "{}", row.join(",")).map_err(io_err)?;
    }
    std::fs::write(path, out).map_err(io_err)
}

/// Per-layer state matrix collected over a driven run, after discarding the
/// leading `washout` columns.
#[derive(Debug, Clone)]
pub struct LayerStates {
    layer_index: usize,
    states: DenseMatrix,
    washout: usize,
    t_total: usize,
}

impl LayerStates {
    /// Wraps an existing state matrix (`units x kept columns`). The kept
    /// column count must equal `t_total - washout`.
    pub fn new(
        layer_index: usize,
        states: DenseMatrix,
        washout: usize,
        t_total: usize,
    ) -> Result<Self> {
        if t_total <= washout || states.cols() != t_total - washout {
            return Err(Error::Dimension(format!(
                "states have {} columns but t_total {} - washout {} requires {}",
                states.cols(),
                t_total,
                washout,
                t_total.saturating_sub(washout)
            )));
        }
        if layer_index == 0 {
            return Err(Error::InvalidArgument("layer_index is 1-based".into()));
        }
        Ok(Self {
            layer_index,
            states,
            washout,
            t_total,
        })
    }

    /// 1-based index of the layer this matrix was collected from.
    pub fn layer_index(&self) -> usize {
        self.layer_index
    }

    /// The `units x kept` state matrix; column `k` holds the state at time
    /// step `washout + 1 + k`.
    pub fn states(&self) -> &DenseMatrix {
        &self.states
    }

    pub fn units(&self) -> usize {
        self.states.rows()
    }

    pub fn kept(&self) -> usize {
        self.states.cols()
    }

    pub fn washout(&self) -> usize {
        self.washout
    }

    pub fn t_total(&self) -> usize {
        self.t_total
    }

    /// Copies `len` kept columns starting at `start` into a new `LayerStates`
    /// whose washout bookkeeping still maps columns to original time steps.
    pub fn slice_columns(&self, start: usize, len: usize) -> Result<LayerStates> {
        if len == 0 || start + len > self.kept() {
            return Err(Error::Dimension(format!(
                "slice [{start}, {start}+{len}) out of {} kept columns",
                self.kept()
            )));
        }
        let units = self.units();
        let states = DenseMatrix::from_fn(units, len, |r, c| self.states.get(r, start + c));
        LayerStates::new(
            self.layer_index,
            states,
            self.washout + start,
            self.washout + start + len,
        )
    }
}

fn draw_matrix(seed: u64, role: u64, layer: u64, rows: usize, cols: usize) -> DenseMatrix {
    let mut rng = SplitMix64::new(derive_stream(seed, role, layer));
    let data = (0..rows * cols).map(|_| rng.next_symmetric()).collect();
    DenseMatrix::new(rows, cols, data).expect("uniform draws are finite")
}

/// Draws, measures, and rescales one weight matrix so `measure` of the result
/// equals `target`. Redraws once from the redraw substream if the measured
/// magnitude is zero.
fn rescaled_draw(
    seed: u64,
    role: u64,
    layer: u64,
    rows: usize,
    cols: usize,
    target: f64,
    measure: impl Fn(&DenseMatrix) -> Result<f64>,
) -> Result<DenseMatrix> {
    for attempt_role in [role, role + STREAM_REDRAW_OFFSET] {
        let draw = draw_matrix(seed, attempt_role, layer, rows, cols);
        let magnitude = measure(&draw)?;
        if magnitude > 0.0 {
            return Ok(draw.scaled(target / magnitude));
        }
    }
    Err(Error::ZeroDraw)
}

/// Builds a reservoir from `config`: uniform draws on [-1, 1) per matrix
/// substream, rescaled to the configured input scaling, inter-layer scaling,
/// and spectral radius. Identical config (seed included) gives a bit-identical
/// reservoir.
pub fn init_reservoir(config: &ReservoirConfig) -> Result<DeepReservoir> {
    config.validate()?;
    let n = config.units_per_layer;
    let norm = |m: &DenseMatrix| operator_norm_2(m, RESCALE_TOL, RESCALE_MAX_ITER);
    let radius = |m: &DenseMatrix| spectral_radius(m, RESCALE_TOL, RESCALE_MAX_ITER);

    let w_in = rescaled_draw(
        config.seed,
        STREAM_INPUT,
        1,
        n,
        config.input_dim,
        config.input_scaling,
        norm,
    )?;
    let mut w_rec = Vec::with_capacity(config.n_layers);
    for layer in 1..=config.n_layers {
        w_rec.push(rescaled_draw(
            config.seed,
            STREAM_RECURRENT,
            layer as u64,
            n,
            n,
            config.spectral_radius,
            radius,
        )?);
    }
    let mut w_inter = Vec::with_capacity(config.n_layers.saturating_sub(1));
    for layer in 2..=config.n_layers {
        w_inter.push(rescaled_draw(
            config.seed,
            STREAM_INTER_LAYER,
            layer as u64,
            n,
            n,
            config.interlayer_scaling,
            norm,
        )?);
    }

    Ok(DeepReservoir {
        config: config.clone(),
        w_in,
        w_inter,
        w_rec,
    })
}

/// One synchronous update of all layers. `prev` holds the previous state of
/// each layer (length `L`, each of length `units`); the returned vector holds
/// the states at the current step, in layer order.
pub fn step(res: &DeepReservoir, u: &DenseVector, prev: &[DenseVector]) -> Result<Vec<DenseVector>> {
    let cfg = res.config();
    if prev.len() != cfg.n_layers {
        return Err(Error::Dimension(format!(
            "expected {} previous states, got {}",
            cfg.n_layers,
            prev.len()
        )));
    }
    for (l, p) in prev.iter().enumerate() {
        if p.len() != cfg.units_per_layer {
            return Err(Error::Dimension(format!(
                "previous state of layer {} has length {}, expected {}",
                l + 1,
                p.len(),
                cfg.units_per_layer
            )));
        }
    }

    let mut states = Vec::with_capacity(cfg.n_layers);
    let drive = res.w_in.matvec(u)?;
    let recur = res.w_rec[0].matvec(&prev[0])?;
    states.push(tanh_sum(&drive, &recur));
    for l in 1..cfg.n_layers {
        let drive = res.w_inter[l - 1].matvec(&states[l - 1])?;
        let recur = res.w_rec[l].matvec(&prev[l])?;
        states.push(tanh_sum(&drive, &recur));
    }
    Ok(states)
}

fn tanh_sum(a: &DenseVector, b: &DenseVector) -> DenseVector {
    let data = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x + y).tanh())
        .collect();
    DenseVector::from_raw(data)
}

/// Drives the reservoir over `input` from the zero initial state and collects
/// the post-washout states of every layer.
pub fn run(res: &DeepReservoir, input: &[DenseVector], washout: usize) -> Result<Vec<LayerStates>> {
    if input.is_empty() {
        return Err(Error::EmptyInput);
    }
    let t_total = input.len();
    if washout >= t_total {
        return Err(Error::WashoutTooLong {
            washout,
            len: t_total,
        });
    }
    let cfg = res.config();
    let units = cfg.units_per_layer;
    let kept = t_total - washout;
    let mut collected: Vec<DenseMatrix> = (0..cfg.n_layers)
        .map(|_| DenseMatrix::zeros(units, kept))
        .collect();
    let mut prev: Vec<DenseVector> = (0..cfg.n_layers).map(|_| DenseVector::zeros(units)).collect();

    for (t, u) in input.iter().enumerate() {
        let states = step(res, u, &prev)?;
        if t >= washout {
            let col = t - washout;
            for (layer, state) in states.iter().enumerate() {
                for (r, &v) in state.as_slice().iter().enumerate() {
                    collected[layer].set(r, col, v);
                }
            }
        }
        prev = states;
    }

    collected
        .into_iter()
        .enumerate()
        .map(|(l, states)| LayerStates::new(l + 1, states, washout, t_total))
        .collect()
}

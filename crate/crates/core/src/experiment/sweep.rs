//! The sweep protocol: for every inter-layer scaling in the grid and every
//! realization, build one L-layer reservoir, drive it, and record per-layer
//! measures (richness sweep) or per-layer readout test errors (prediction
//! sweep). Records aggregate into mean/std rows over realizations.
//!
//! Seeding policy: the task data stream and the per-realization reservoir
//! seeds derive from the master seed; the grid index is deliberately not part
//! of the realization seed, so the same reservoir draws are rescaled across
//! grid values and the inter-layer scaling is the only thing that changes.
//! Layer `l` of the L-layer network evolves exactly as the top layer of an
//! l-layer network (there is no top-down coupling), so a single deep run
//! covers every depth.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::data::{generate_narma10, load_laser, next_step_task, NarmaParams, TimeSeriesTask,
    DEFAULT_LASER_SCALE};
use crate::error::{Error, Result};
use crate::experiment::config::{ExperimentConfig, TaskKind};
use crate::experiment::table::{mean_std, Metric, ResultRow, ResultTable};
use crate::measures::{average_state_entropy, condition_number, uncoupled_dynamics, EntropyParams};
use crate::numerics::{DenseMatrix, DenseVector};
use crate::readout::{mse, predict, train_direct, train_lms};
use crate::reservoir::{init_reservoir, run, LayerStates};
use crate::rng::derive_stream;

/// Substream tags of the experiment module (see `rng`): task data and
/// realization seeds.
const STREAM_TASK_DATA: u64 = 0x11;
const STREAM_REALIZATION: u64 = 0x12;

/// Reservoir seed of one realization: `derive_stream(master, tag, index)`.
pub fn realization_seed(master_seed: u64, realization: usize) -> u64 {
    derive_stream(master_seed, STREAM_REALIZATION, realization as u64)
}

fn data_seed(master_seed: u64) -> u64 {
    derive_stream(master_seed, STREAM_TASK_DATA, 0)
}

/// Builds the configured task over `train_len + test_len` steps.
pub fn build_task(cfg: &ExperimentConfig) -> Result<TimeSeriesTask> {
    let train = cfg.train_len;
    let test = cfg.effective_test_len();
    match cfg.task {
        TaskKind::Narma10 => generate_narma10(train + test, data_seed(cfg.seed), &NarmaParams::default())?
            .with_split(train, test),
        TaskKind::Laser => {
            let path = cfg
                .laser_path
                .as_ref()
                .ok_or_else(|| Error::InvalidConfig("task \"laser\" requires laser-path".into()))?;
            let series = load_laser(path, DEFAULT_LASER_SCALE)?;
            let mut task = next_step_task(&series, train, test)?;
            task.name = "laser".into();
            Ok(task)
        }
    }
}

/// Per-layer richness measures of one `(omega_il, realization)` work unit.
#[derive(Debug, Clone, PartialEq)]
pub struct RichnessRecord {
    pub task: String,
    pub omega_il: f64,
    pub realization: usize,
    pub layer: usize,
    pub ase: f64,
    pub ud: usize,
    /// `None` when the state matrix hit the rank-deficiency sentinel.
    pub kappa: Option<f64>,
    pub log10_kappa: Option<f64>,
}

/// Per-layer readout test errors of one `(omega_il, realization)` work unit.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    pub task: String,
    pub omega_il: f64,
    pub realization: usize,
    pub layer: usize,
    /// Test MSE of the LMS readout; on divergence this is the final computed
    /// epoch MSE (training pass), flagged below.
    pub mse_lms: f64,
    pub lms_diverged: bool,
    /// Test MSE of the direct least-squares baseline.
    pub mse_direct: f64,
}

fn scalar_inputs(values: &[f64]) -> Vec<DenseVector> {
    values.iter().map(|&u| DenseVector::scalar(u)).collect()
}

fn work_units(cfg: &ExperimentConfig) -> Vec<(usize, usize)> {
    let mut units = Vec::with_capacity(cfg.omega_il.len() * cfg.realizations);
    for gi in 0..cfg.omega_il.len() {
        for r in 0..cfg.realizations {
            units.push((gi, r));
        }
    }
    units
}

/// Runs the richness protocol and returns one record per
/// `(omega_il, realization, layer)`, in canonical order.
pub fn run_richness_records(cfg: &ExperimentConfig) -> Result<Vec<RichnessRecord>> {
    cfg.validate()?;
    let task = build_task(cfg)?;
    let inputs = scalar_inputs(task.split().train_inputs);
    let entropy = EntropyParams::default();

    let nested: Result<Vec<Vec<RichnessRecord>>> = work_units(cfg)
        .par_iter()
        .map(|&(gi, realization)| {
            let omega_il = cfg.omega_il[gi];
            let seed = realization_seed(cfg.seed, realization);
            let reservoir = init_reservoir(&cfg.reservoir_config(omega_il, seed))?;
            let layer_states = run(&reservoir, &inputs, cfg.washout)?;
            layer_states
                .iter()
                .map(|s| {
                    let ase = average_state_entropy(s, &entropy)?;
                    let ud = uncoupled_dynamics(s, cfg.explained)?;
                    let (kappa, log10_kappa) = match condition_number(s) {
                        Ok((k, l)) => (Some(k), Some(l)),
                        Err(Error::RankDeficient { .. }) => (None, None),
                        Err(e) => return Err(e),
                    };
                    Ok(RichnessRecord {
                        task: task.name.clone(),
                        omega_il,
                        realization,
                        layer: s.layer_index(),
                        ase,
                        ud,
                        kappa,
                        log10_kappa,
                    })
                })
                .collect()
        })
        .collect();
    Ok(nested?.into_iter().flatten().collect())
}

/// Richness sweep: records aggregated per `(omega_il, layer, metric)`.
pub fn run_richness_sweep(cfg: &ExperimentConfig) -> Result<ResultTable> {
    aggregate_richness(&run_richness_records(cfg)?)
}

/// Runs the prediction protocol: the reservoir is driven over the
/// concatenated train+test inputs without reset (the test set is the
/// continuation of the training sequence), readouts are trained on the
/// post-washout training columns, and errors are evaluated on the test
/// columns.
pub fn run_prediction_records(cfg: &ExperimentConfig) -> Result<Vec<PredictionRecord>> {
    cfg.validate()?;
    let task = build_task(cfg)?;
    let test_len = cfg.effective_test_len();
    let train_cols = cfg.train_len - cfg.washout;
    let inputs = scalar_inputs(&task.inputs[..cfg.train_len + test_len]);
    let train_targets = DenseMatrix::new(
        1,
        train_cols,
        task.targets[cfg.washout..cfg.train_len].to_vec(),
    )?;
    let test_targets = DenseMatrix::new(
        1,
        test_len,
        task.targets[cfg.train_len..cfg.train_len + test_len].to_vec(),
    )?;
    let lms_params = cfg.lms_params();

    let nested: Result<Vec<Vec<PredictionRecord>>> = work_units(cfg)
        .par_iter()
        .map(|&(gi, realization)| {
            let omega_il = cfg.omega_il[gi];
            let seed = realization_seed(cfg.seed, realization);
            let reservoir = init_reservoir(&cfg.reservoir_config(omega_il, seed))?;
            let layer_states = run(&reservoir, &inputs, cfg.washout)?;
            layer_states
                .iter()
                .map(|s| {
                    let train_states = s.slice_columns(0, train_cols)?;
                    let test_states = s.slice_columns(train_cols, test_len)?;

                    let (mse_lms, lms_diverged) =
                        match train_lms(&train_states, &train_targets, &lms_params) {
                            Ok((readout, _trace)) => {
                                let pred = predict(&readout, &test_states)?;
                                (mse(&pred, &test_targets)?, false)
                            }
                            Err(Error::LmsDiverged { trace, .. }) => {
                                let last = *trace.last().expect("divergence records the epoch");
                                (if last.is_finite() { last } else { f64::INFINITY }, true)
                            }
                            Err(e) => return Err(e),
                        };

                    let direct = train_direct(&train_states, &train_targets, 0.0)?;
                    let pred = predict(&direct, &test_states)?;
                    let mse_direct = mse(&pred, &test_targets)?;

                    Ok(PredictionRecord {
                        task: task.name.clone(),
                        omega_il,
                        realization,
                        layer: s.layer_index(),
                        mse_lms,
                        lms_diverged,
                        mse_direct,
                    })
                })
                .collect()
        })
        .collect();
    Ok(nested?.into_iter().flatten().collect())
}

/// Prediction sweep: records aggregated per `(omega_il, layer, metric)`.
pub fn run_prediction_sweep(cfg: &ExperimentConfig) -> Result<ResultTable> {
    aggregate_prediction(&run_prediction_records(cfg)?)
}

type GroupKey = (String, u64, usize);

fn group_key(task: &str, omega_il: f64, layer: usize) -> GroupKey {
    // omega_il is positive, so its bit pattern orders like the value.
    (task.to_string(), omega_il.to_bits(), layer)
}

/// Aggregates richness records into `(ase, ud, log10_kappa)` rows with the
/// mean and population standard deviation over realizations. Rank-deficient
/// condition numbers are skipped and counted in the row flags.
pub fn aggregate_richness(records: &[RichnessRecord]) -> Result<ResultTable> {
    #[derive(Default)]
    struct Group {
        omega_il: f64,
        ase: Vec<f64>,
        ud: Vec<f64>,
        log10_kappa: Vec<f64>,
        rank_deficient: usize,
    }

    let mut groups: BTreeMap<GroupKey, Group> = BTreeMap::new();
    for rec in records {
        let g = groups
            .entry(group_key(&rec.task, rec.omega_il, rec.layer))
            .or_default();
        g.omega_il = rec.omega_il;
        g.ase.push(rec.ase);
        g.ud.push(rec.ud as f64);
        match rec.log10_kappa {
            Some(l) => g.log10_kappa.push(l),
            None => g.rank_deficient += 1,
        }
    }

    let mut table = ResultTable::default();
    for ((task, _, layer), g) in groups {
        let (mean, std) = mean_std(&g.ase)?;
        table.rows.push(ResultRow {
            task: task.clone(),
            omega_il: g.omega_il,
            layer,
            metric: Metric::Ase,
            mean,
            std,
            n: g.ase.len(),
            flags: String::new(),
        });
        let (mean, std) = mean_std(&g.ud)?;
        table.rows.push(ResultRow {
            task: task.clone(),
            omega_il: g.omega_il,
            layer,
            metric: Metric::Ud,
            mean,
            std,
            n: g.ud.len(),
            flags: String::new(),
        });
        let flags = if g.rank_deficient > 0 {
            format!("rank_deficient:{}", g.rank_deficient)
        } else {
            String::new()
        };
        // A group where every realization hit the sentinel still gets a row,
        // with NaN statistics and the flag carrying the count.
        let (mean, std) = if g.log10_kappa.is_empty() {
            (f64::NAN, f64::NAN)
        } else {
            mean_std(&g.log10_kappa)?
        };
        table.rows.push(ResultRow {
            task,
            omega_il: g.omega_il,
            layer,
            metric: Metric::Log10Kappa,
            mean,
            std,
            n: g.log10_kappa.len(),
            flags,
        });
    }
    table.sort();
    Ok(table)
}

/// Aggregates prediction records into `(test_mse_lms, test_mse_direct)` rows.
/// Diverged LMS runs contribute their final recorded value and are counted in
/// the row flags.
pub fn aggregate_prediction(records: &[PredictionRecord]) -> Result<ResultTable> {
    #[derive(Default)]
    struct Group {
        omega_il: f64,
        lms: Vec<f64>,
        direct: Vec<f64>,
        diverged: usize,
    }

    let mut groups: BTreeMap<GroupKey, Group> = BTreeMap::new();
    for rec in records {
        let g = groups
            .entry(group_key(&rec.task, rec.omega_il, rec.layer))
            .or_default();
        g.omega_il = rec.omega_il;
        g.lms.push(rec.mse_lms);
        g.direct.push(rec.mse_direct);
        if rec.lms_diverged {
            g.diverged += 1;
        }
    }

    let mut table = ResultTable::default();
    for ((task, _, layer), g) in groups {
        let flags = if g.diverged > 0 {
            format!("diverged:{}", g.diverged)
        } else {
            String::new()
        };
        let (mean, std) = mean_std(&g.lms)?;
        table.rows.push(ResultRow {
            task: task.clone(),
            omega_il: g.omega_il,
            layer,
            metric: Metric::TestMseLms,
            mean,
            std,
            n: g.lms.len(),
            flags,
        });
        let (mean, std) = mean_std(&g.direct)?;
        table.rows.push(ResultRow {
            task,
            omega_il: g.omega_il,
            layer,
            metric: Metric::TestMseDirect,
            mean,
            std,
            n: g.direct.len(),
            flags: String::new(),
        });
    }
    table.sort();
    Ok(table)
}

/// Richness measures of a bare state matrix (used by the `measure` CLI
/// subcommand on user-supplied state CSVs).
pub fn measure_states(states: DenseMatrix, explained: f64) -> Result<(f64, usize, f64, f64)> {
    let cols = states.cols();
    let layer = LayerStates::new(1, states, 0, cols)?;
    let ase = average_state_entropy(&layer, &EntropyParams::default())?;
    let ud = uncoupled_dynamics(&layer, explained)?;
    let (kappa, log10_kappa) = condition_number(&layer)?;
    Ok((ase, ud, kappa, log10_kappa))
}

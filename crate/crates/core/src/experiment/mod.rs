//! Seeded experiment sweeps: hyperparameter grids, multi-realization runs,
//! per-layer measure and error collection, aggregation, and CSV emission.
//!
//! Work units (one per `(omega_il, realization)` pair) are independent and
//! run in parallel; results merge in canonical order, so the emitted CSV is
//! a pure function of the configuration regardless of thread count.

mod config;
mod sweep;
mod table;

pub use config::{ExperimentConfig, TaskKind};
pub use sweep::{
    aggregate_prediction, aggregate_richness, build_task, measure_states, realization_seed,
    run_prediction_records, run_prediction_sweep, run_richness_records, run_richness_sweep,
    PredictionRecord, RichnessRecord,
};
pub use table::{emit_csv, mean_std, Metric, ResultRow, ResultTable};

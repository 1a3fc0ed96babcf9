//! Command-line harness for deep echo state network experiments.
//!
//! Subcommands: `richness` (per-layer richness sweep), `predict` (per-layer
//! LMS and direct readout test errors), `narma-gen` (dump a generated NARMA
//! task), and `measure` (ASE/UD/kappa of a state CSV). Sweep parameters come
//! from flags, optionally seeded by a JSON config file (`--config`); flags
//! override file values. Results go to `--out` or stdout.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use deepesn::data::{generate_narma10, NarmaParams};
use deepesn::experiment::{
    emit_csv, measure_states, run_prediction_sweep, run_richness_sweep, ExperimentConfig,
    ResultTable,
};
use deepesn::numerics::DenseMatrix;

#[derive(Parser)]
#[command(name = "deepesn", version, about = "Deep echo state network experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the per-layer reservoir richness sweep (ASE, UD, condition number)
    Richness(SweepArgs),
    /// Run the per-layer prediction sweep (LMS and direct readout test MSE)
    Predict(SweepArgs),
    /// Generate a NARMA-10 task and dump it as CSV (t,u,y_tg)
    NarmaGen(NarmaGenArgs),
    /// Compute ASE, UD, and condition number of a state-matrix CSV
    Measure(MeasureArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// JSON config file with the same keys as these flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Benchmark task: "narma10" or "laser"
    #[arg(long)]
    task: Option<String>,
    /// Laser data file (one integer sample per line)
    #[arg(long)]
    laser_path: Option<PathBuf>,
    /// Number of reservoir layers
    #[arg(long)]
    layers: Option<usize>,
    /// Units per layer
    #[arg(long)]
    units: Option<usize>,
    /// Spectral radius of every recurrent matrix
    #[arg(long)]
    rho: Option<f64>,
    /// Operator 2-norm of the input matrix
    #[arg(long)]
    omega_in: Option<f64>,
    /// Inter-layer scaling; repeat the flag to sweep a grid
    #[arg(long)]
    omega_il: Vec<f64>,
    /// Reservoir realizations per grid point
    #[arg(long)]
    realizations: Option<usize>,
    /// Training sequence length (washout included)
    #[arg(long)]
    train_len: Option<usize>,
    /// Test sequence length (defaults: 5000 NARMA, 5092 laser)
    #[arg(long)]
    test_len: Option<usize>,
    /// Leading steps discarded from every run
    #[arg(long)]
    washout: Option<usize>,
    /// LMS learning rate
    #[arg(long)]
    lms_eta: Option<f64>,
    /// LMS training epochs
    #[arg(long)]
    lms_epochs: Option<usize>,
    /// Master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Explained-variability threshold for the UD count
    #[arg(long)]
    explained: Option<f64>,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SweepArgs {
    fn into_config(self) -> Result<(ExperimentConfig, Option<PathBuf>)> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)
                .with_context(|| format!("loading config {}", path.display()))?,
            None => ExperimentConfig::default(),
        };
        if let Some(task) = &self.task {
            cfg.task = task.parse()?;
        }
        if let Some(path) = self.laser_path {
            cfg.laser_path = Some(path);
        }
        if let Some(v) = self.layers {
            cfg.layers = v;
        }
        if let Some(v) = self.units {
            cfg.units = v;
        }
        if let Some(v) = self.rho {
            cfg.rho = v;
        }
        if let Some(v) = self.omega_in {
            cfg.omega_in = v;
        }
        if !self.omega_il.is_empty() {
            cfg.omega_il = self.omega_il;
        }
        if let Some(v) = self.realizations {
            cfg.realizations = v;
        }
        if let Some(v) = self.train_len {
            cfg.train_len = v;
        }
        if let Some(v) = self.test_len {
            cfg.test_len = Some(v);
        }
        if let Some(v) = self.washout {
            cfg.washout = v;
        }
        if let Some(v) = self.lms_eta {
            cfg.lms_eta = v;
        }
        if let Some(v) = self.lms_epochs {
            cfg.lms_epochs = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.explained {
            cfg.explained = v;
        }
        let out = self.out.or_else(|| cfg.out.clone());
        cfg.validate()?;
        Ok((cfg, out))
    }
}

#[derive(Args)]
struct NarmaGenArgs {
    /// Training length of the generated task
    #[arg(long, default_value_t = 5000)]
    train_len: usize,
    /// Test length of the generated task
    #[arg(long, default_value_t = 5000)]
    test_len: usize,
    /// Generator seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MeasureArgs {
    /// State matrix CSV: one row of comma-separated unit activations per line,
    /// columns are time steps
    states: PathBuf,
    /// Explained-variability threshold for the UD count
    #[arg(long, default_value_t = 0.9)]
    explained: f64,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Richness(args) => {
            let (cfg, out) = args.into_config()?;
            let table = run_richness_sweep(&cfg)?;
            write_table(&table, out.as_deref())
        }
        Command::Predict(args) => {
            let (cfg, out) = args.into_config()?;
            let table = run_prediction_sweep(&cfg)?;
            write_table(&table, out.as_deref())
        }
        Command::NarmaGen(args) => {
            let task = generate_narma10(
                args.train_len + args.test_len,
                args.seed,
                &NarmaParams::default(),
            )?
            .with_split(args.train_len, args.test_len)?;
            match args.out {
                Some(path) => task
                    .write_csv(&path)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{}", task.to_csv_string()),
            }
            Ok(())
        }
        Command::Measure(args) => {
            let states = read_matrix_csv(&args.states)
                .with_context(|| format!("reading {}", args.states.display()))?;
            let (ase, ud, kappa, log10_kappa) = measure_states(states, args.explained)?;
            let report = format!(
                "metric,value\nase,{ase:e}\nud,{ud}\nkappa,{kappa:e}\nlog10_kappa,{log10_kappa:e}\n"
            );
            match args.out {
                Some(path) => std::fs::write(&path, report)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{report}"),
            }
            Ok(())
        }
    }
}

fn write_table(table: &ResultTable, out: Option<&std::path::Path>) -> Result<()> {
    match out {
        Some(path) => {
            emit_csv(table, path)?;
            eprintln!("wrote {} rows to {}", table.rows.len(), path.display());
        }
        None => {
            let stdout = std::io::stdout();
            table.write_csv(stdout.lock())?;
            std::io::stdout().flush()?;
        }
    }
    Ok(())
}

fn read_matrix_csv(path: &std::path::Path) -> Result<DenseMatrix> {
    let text = std::fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .with_context(|| format!("line {}: bad value {tok:?}", i + 1))
            })
            .collect::<Result<_>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                bail!(
                    "line {}: expected {} columns, got {}",
                    i + 1,
                    first.len(),
                    row.len()
                );
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("no rows found");
    }
    let n_rows = rows.len();
    let n_cols = rows[0].len();
    Ok(DenseMatrix::new(
        n_rows,
        n_cols,
        rows.into_iter().flatten().collect(),
    )?)
}

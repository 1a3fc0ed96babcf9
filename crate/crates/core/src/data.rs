//! Benchmark task construction: a tenth-order NARMA generator, laser-series
//! ingestion with next-step targets, and contiguous train/test splitting.

use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Scale applied to raw laser samples in the standard protocol.
pub const DEFAULT_LASER_SCALE: f64 = 0.01;

/// A univariate input/target series with a contiguous train/test split.
/// Inputs and targets are index-aligned.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesTask {
    pub name: String,
    pub inputs: Vec<f64>,
    pub targets: Vec<f64>,
    pub train_len: usize,
    pub test_len: usize,
}

/// The four slices of a split task, in (inputs, targets) order.
#[derive(Debug, Clone, Copy)]
pub struct TaskSplit<'a> {
    pub train_inputs: &'a [f64],
    pub train_targets: &'a [f64],
    pub test_inputs: &'a [f64],
    pub test_targets: &'a [f64],
}

impl TimeSeriesTask {
    pub fn validate(&self) -> Result<()> {
        if self.inputs.len() != self.targets.len() {
            return Err(Error::Dimension(format!(
                "task {:?}: {} inputs vs {} targets",
                self.name,
                self.inputs.len(),
                self.targets.len()
            )));
        }
        if self.inputs.len() < self.train_len + self.test_len {
            return Err(Error::SeriesTooShort {
                required: self.train_len + self.test_len,
                actual: self.inputs.len(),
            });
        }
        if let Some(bad) = self
            .inputs
            .iter()
            .chain(&self.targets)
            .find(|v| !v.is_finite())
        {
            return Err(Error::NonFinite(format!("task value {bad}")));
        }
        Ok(())
    }

    /// Returns the same task with a new train/test split, validated.
    pub fn with_split(mut self, train_len: usize, test_len: usize) -> Result<Self> {
        self.train_len = train_len;
        self.test_len = test_len;
        self.validate()?;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Contiguous, non-overlapping train and test slices. The test segment is
    /// the direct continuation of the training segment; harnesses run the
    /// reservoir over both as one sequence and slice the collected states.
    pub fn split(&self) -> TaskSplit<'_> {
        let t = self.train_len;
        let e = t + self.test_len;
        TaskSplit {
            train_inputs: &self.inputs[..t],
            train_targets: &self.targets[..t],
            test_inputs: &self.inputs[t..e],
            test_targets: &self.targets[t..e],
        }
    }

    /// `t,u,y_tg` rows (1-based `t`) for inspection.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("t,u,y_tg\n");
        for (t, (u, y)) in self.inputs.iter().zip(&self.targets).enumerate() {
            out.push_str(&format!("{},{:e},{:e}\n", t + 1, u, y));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Coefficients and input range of the tenth-order NARMA recurrence
/// `y(t) = c_ar y(t-1) + c_nl y(t-1) (sum_{i=1..order} y(t-i))
///        + c_in u(t-order) u(t-1) + c_const`,
/// driven by i.i.d. uniform input on `[input_low, input_high)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NarmaParams {
    pub order: usize,
    pub c_ar: f64,
    pub c_nl: f64,
    pub c_in: f64,
    pub c_const: f64,
    pub input_low: f64,
    pub input_high: f64,
}

impl Default for NarmaParams {
    fn default() -> Self {
        Self {
            order: 10,
            c_ar: 0.3,
            c_nl: 0.05,
            c_in: 1.5,
            c_const: 0.1,
            input_low: 0.0,
            input_high: 0.5,
        }
    }
}

/// Magnitude bound beyond which a NARMA draw is abandoned and regenerated
/// from the next seed.
const NARMA_DIVERGENCE_BOUND: f64 = 1e3;
const NARMA_MAX_ATTEMPTS: usize = 10;

/// Generates a NARMA task of `length` steps. Histories are zero for `t <= 0`;
/// inputs come from the seeded stream; on (rare) divergence the whole
/// sequence is regenerated from `seed + 1`, up to ten attempts.
pub fn generate_narma10(length: usize, seed: u64, params: &NarmaParams) -> Result<TimeSeriesTask> {
    if length == 0 {
        return Err(Error::InvalidArgument("length must be positive".into()));
    }
    if params.order == 0 {
        return Err(Error::InvalidArgument("order must be positive".into()));
    }
    let range_ok = params.input_low.is_finite()
        && params.input_high.is_finite()
        && params.input_high >= params.input_low;
    if !range_ok {
        return Err(Error::InvalidArgument(format!(
            "input range [{}, {}) is empty or non-finite",
            params.input_low, params.input_high
        )));
    }

    'attempt: for attempt in 0..NARMA_MAX_ATTEMPTS {
        let mut rng = SplitMix64::new(seed.wrapping_add(attempt as u64));
        let u: Vec<f64> = (0..length)
            .map(|_| rng.next_range(params.input_low, params.input_high))
            .collect();
        let mut y = vec![0.0; length];
        for t in 0..length {
            // 0-based index; y[t - k] and u[t - k] are zero when t < k.
            let y_at = |k: usize| if t >= k { y[t - k] } else { 0.0 };
            let u_at = |k: usize| if t >= k { u[t - k] } else { 0.0 };
            let history: f64 = (1..=params.order).map(y_at).sum();
            let value = params.c_ar * y_at(1)
                + params.c_nl * y_at(1) * history
                + params.c_in * u_at(params.order) * u_at(1)
                + params.c_const;
            if !value.is_finite() || value.abs() > NARMA_DIVERGENCE_BOUND {
                continue 'attempt;
            }
            y[t] = value;
        }
        return Ok(TimeSeriesTask {
            name: "narma10".into(),
            inputs: u,
            targets: y,
            train_len: length,
            test_len: 0,
        });
    }
    Err(Error::GeneratorDiverged(NARMA_MAX_ATTEMPTS))
}

/// Loads a laser-intensity series: plain text, one sample per line, scaled by
/// `scale`. See [`load_laser_with`] to accept comma-separated lines.
pub fn load_laser(path: &Path, scale: f64) -> Result<Vec<f64>> {
    load_laser_with(path, scale, false)
}

/// Like [`load_laser`]; when `accept_commas` is set, each line may carry
/// several comma-separated samples.
pub fn load_laser_with(path: &Path, scale: f64, accept_commas: bool) -> Result<Vec<f64>> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: display.clone(),
        source,
    })?;
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = if accept_commas {
            line.split(',').map(str::trim).collect()
        } else {
            vec![line]
        };
        for token in tokens {
            if token.is_empty() {
                continue;
            }
            let value: f64 = token.parse().map_err(|_| Error::ParseSample {
                path: display.clone(),
                line: i + 1,
                token: token.to_string(),
            })?;
            samples.push(value * scale);
        }
    }
    if samples.is_empty() {
        return Err(Error::EmptyData { path: display });
    }
    Ok(samples)
}

/// Builds a next-step prediction task from a raw series: input `u(t)` is the
/// sample at `t`, target `y_tg(t) = u(t + 1)`. All consecutive pairs are
/// kept; the split consumes the first `train_len + test_len` of them.
pub fn next_step_task(series: &[f64], train_len: usize, test_len: usize) -> Result<TimeSeriesTask> {
    let required = train_len + test_len + 1;
    if series.len() < required {
        return Err(Error::SeriesTooShort {
            required,
            actual: series.len(),
        });
    }
    let task = TimeSeriesTask {
        name: "next-step".into(),
        inputs: series[..series.len() - 1].to_vec(),
        targets: series[1..].to_vec(),
        train_len,
        test_len,
    };
    task.validate()?;
    Ok(task)
}

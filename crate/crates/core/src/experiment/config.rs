//! Declarative sweep configuration and its JSON file form.
//!
//! The JSON config file is a flat object whose keys are exactly the CLI flag
//! names (`task`, `laser-path`, `layers`, `units`, `rho`, `omega-in`,
//! `omega-il`, `realizations`, `train-len`, `test-len`, `washout`,
//! `lms-eta`, `lms-epochs`, `seed`, `explained`, `out`); CLI flags override
//! file values.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::readout::LmsParams;
use crate::reservoir::ReservoirConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Narma10,
    Laser,
}

impl TaskKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TaskKind::Narma10 => "narma10",
            TaskKind::Laser => "laser",
        }
    }
}

impl FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "narma10" => Ok(TaskKind::Narma10),
            "laser" => Ok(TaskKind::Laser),
            other => Err(Error::InvalidConfig(format!(
                "unknown task {other:?} (expected \"narma10\" or \"laser\")"
            ))),
        }
    }
}

/// Full sweep description. Defaults follow the standard protocol: 100-unit
/// layers, spectral radius 0.9, unit input scaling, inter-layer grid
/// {0.5, 1, 2}, 15 realizations, 5000 training steps with a 1000-step
/// washout, and LMS at eta = 0.01 for 5000 epochs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub task: TaskKind,
    pub laser_path: Option<PathBuf>,
    /// Number of reservoir layers L; layer-wise results cover 1..=L.
    pub layers: usize,
    pub units: usize,
    pub rho: f64,
    pub omega_in: f64,
    /// Inter-layer scaling grid; one sweep runs every value.
    pub omega_il: Vec<f64>,
    pub realizations: usize,
    pub train_len: usize,
    /// Test length; defaults to 5000 for NARMA and 5092 for laser.
    pub test_len: Option<usize>,
    pub washout: usize,
    pub lms_eta: f64,
    pub lms_epochs: usize,
    /// Master seed: task data and realization seeds derive from it.
    pub seed: u64,
    /// Explained-variability threshold for the uncoupled-dynamics count.
    pub explained: f64,
    /// Default output path; CLI `--out` overrides.
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            task: TaskKind::Narma10,
            laser_path: None,
            layers: 5,
            units: 100,
            rho: 0.9,
            omega_in: 1.0,
            omega_il: vec![0.5, 1.0, 2.0],
            realizations: 15,
            train_len: 5000,
            test_len: None,
            washout: 1000,
            lms_eta: 0.01,
            lms_epochs: 5000,
            seed: 42,
            explained: 0.9,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn narma10() -> Self {
        Self::default()
    }

    pub fn laser(path: impl Into<PathBuf>) -> Self {
        Self {
            task: TaskKind::Laser,
            laser_path: Some(path.into()),
            ..Self::default()
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| {
            Error::InvalidConfig(format!("{}: {e}", path.display()))
        })
    }

    pub fn effective_test_len(&self) -> usize {
        self.test_len.unwrap_or(match self.task {
            TaskKind::Narma10 => 5000,
            TaskKind::Laser => 5092,
        })
    }

    pub fn lms_params(&self) -> LmsParams {
        LmsParams {
            learning_rate: self.lms_eta,
            epochs: self.lms_epochs,
        }
    }

    /// The reservoir built for one `(omega_il, realization seed)` work unit.
    pub fn reservoir_config(&self, omega_il: f64, seed: u64) -> ReservoirConfig {
        ReservoirConfig {
            n_layers: self.layers,
            units_per_layer: self.units,
            input_dim: 1,
            spectral_radius: self.rho,
            input_scaling: self.omega_in,
            interlayer_scaling: omega_il,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers == 0 || self.units == 0 || self.realizations == 0 {
            return Err(Error::InvalidConfig(
                "layers, units, and realizations must be positive".into(),
            ));
        }
        for (name, v) in [("rho", self.rho), ("omega-in", self.omega_in)] {
            let ok = v.is_finite() && v > 0.0;
            if !ok {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.omega_il.is_empty() {
            return Err(Error::InvalidConfig("omega-il grid must be non-empty".into()));
        }
        if !self.omega_il.iter().all(|v| v.is_finite() && *v > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "omega-il grid values must be positive and finite, got {:?}",
                self.omega_il
            )));
        }
        if !(self.explained > 0.0 && self.explained <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "explained must lie in (0, 1], got {}",
                self.explained
            )));
        }
        if self.washout >= self.train_len {
            return Err(Error::InvalidConfig(format!(
                "washout {} must be smaller than train-len {}",
                self.washout, self.train_len
            )));
        }
        if self.effective_test_len() == 0 {
            return Err(Error::InvalidConfig("test-len must be positive".into()));
        }
        let lms_ok = self.lms_eta.is_finite() && self.lms_eta > 0.0 && self.lms_epochs > 0;
        if !lms_ok {
            return Err(Error::InvalidConfig(format!(
                "lms-eta must be positive ({}) and lms-epochs at least 1 ({})",
                self.lms_eta, self.lms_epochs
            )));
        }
        if self.task == TaskKind::Laser && self.laser_path.is_none() {
            return Err(Error::InvalidConfig(
                "task \"laser\" requires laser-path".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_protocol() {
        let cfg = ExperimentConfig::narma10();
        assert_eq!(cfg.units, 100);
        assert_eq!(cfg.rho, 0.9);
        assert_eq!(cfg.omega_in, 1.0);
        assert_eq!(cfg.omega_il, vec![0.5, 1.0, 2.0]);
        assert_eq!(cfg.realizations, 15);
        assert_eq!(cfg.washout, 1000);
        assert_eq!(cfg.train_len, 5000);
        assert_eq!(cfg.effective_test_len(), 5000);
        assert_eq!(cfg.lms_eta, 0.01);
        assert_eq!(cfg.lms_epochs, 5000);
        assert_eq!(cfg.explained, 0.9);
        cfg.validate().unwrap();
    }

    #[test]
    fn laser_defaults_and_requirements() {
        let cfg = ExperimentConfig::laser("/tmp/laser.txt");
        assert_eq!(cfg.effective_test_len(), 5092);
        cfg.validate().unwrap();
        let mut broken = cfg;
        broken.laser_path = None;
        assert!(broken.validate().is_err());
    }

    #[test]
    fn json_uses_flag_names_and_flags_overridable() {
        let json = r#"{
            "task": "laser",
            "laser-path": "data/laser.txt",
            "layers": 3,
            "omega-il": [2.0],
            "lms-eta": 0.005,
            "train-len": 2000,
            "washout": 100,
            "seed": 7
        }"#;
        let cfg: ExperimentConfig = serde_json::from_str(json).unwrap();
        assert_eq!(cfg.task, TaskKind::Laser);
        assert_eq!(cfg.layers, 3);
        assert_eq!(cfg.omega_il, vec![2.0]);
        assert_eq!(cfg.lms_eta, 0.005);
        assert_eq!(cfg.units, 100); // untouched default
        assert_eq!(cfg.seed, 7);
    }

    #[test]
    fn unknown_keys_rejected() {
        let json = r#"{ "task": "narma10", "omega": [1.0] }"#;
        assert!(serde_json::from_str::<ExperimentConfig>(json).is_err());
    }

    #[test]
    fn validation_catches_bad_ranges() {
        let mut cfg = ExperimentConfig::narma10();
        cfg.explained = 1.5;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::narma10();
        cfg.washout = 5000;
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::narma10();
        cfg.omega_il = vec![];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn task_kind_parses() {
        assert_eq!("narma10".parse::<TaskKind>().unwrap(), TaskKind::Narma10);
        assert_eq!("laser".parse::<TaskKind>().unwrap(), TaskKind::Laser);
        assert!("mackey".parse::<TaskKind>().is_err());
    }
}

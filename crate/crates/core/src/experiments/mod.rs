//! Scripted simulation studies. Each writes a run directory holding
//! `manifest.json`, its CSV tables and an optional SVG quick-look.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::Dataset;
use crate::seeds;
use crate::target::TargetFunction;

pub mod fig1;
pub mod sim1;
pub mod sim2;
pub mod sim3;
pub mod sweep;
pub mod tools;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    #[default]
    Desk,
    Full,
}

impl Preset {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "desk" => Ok(Preset::Desk),
            "full" => Ok(Preset::Full),
            other => Err(Error::Config(format!("unknown preset '{other}', expected desk or full"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub std: f64,
    pub stderr: f64,
    pub n: usize,
}

impl Stats {
    /// Sample statistics, summed in slice order.
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Stats {
                mean: f64::NAN,
                std: f64::NAN,
                stderr: f64::NAN,
                n,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Stats {
            mean,
            std,
            stderr: std / (n as f64).sqrt(),
            n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub id: String,
    pub seed: u64,
    pub metrics: BTreeMap<String, f64>,
}

impl TrialRecord {
    pub fn new(id: impl Into<String>, seed: u64) -> Self {
        TrialRecord {
            id: id.into(),
            seed,
            metrics: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.metrics.insert(key.to_string(), value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: String,
    pub version: String,
    pub config: serde_json::Value,
    pub root_seed: u64,
    pub trials: Vec<TrialRecord>,
    pub aggregate: BTreeMap<String, Stats>,
    pub outputs: Vec<String>,
    pub wall_time_s: f64,
}

impl Manifest {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn config_as<C: DeserializeOwned>(&self) -> Result<C> {
        Ok(serde_json::from_value(self.config.clone())?)
    }

    pub fn metric(&self, trial: &str, key: &str) -> Option<f64> {
        self.trials.iter().find(|t| t.id == trial)?.metrics.get(key).copied()
    }
}

/// An output directory that tracks the files written into it.
pub struct RunDir {
    root: PathBuf,
    outputs: Vec<String>,
    started: Instant,
}

impl RunDir {
    pub fn create(root: impl AsRef<Path>) -> Result<Self> {
        std::fs::create_dir_all(root.as_ref())?;
        Ok(RunDir {
            root: root.as_ref().to_path_buf(),
            outputs: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(self.path(name))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        std::fs::write(self.path(name), text)?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    /// Records a file written by other code.
    pub fn track(&mut self, name: &str) {
        self.outputs.push(name.to_string());
    }

    pub fn finish<C: Serialize>(
        self,
        experiment: &str,
        config: &C,
        root_seed: u64,
        trials: Vec<TrialRecord>,
        aggregate: BTreeMap<String, Stats>,
    ) -> Result<Manifest> {
        let mut outputs = self.outputs;
        outputs.push("manifest.json".into());
        let m = Manifest {
            experiment: experiment.to_string(),
            version: VERSION.to_string(),
            config: serde_json::to_value(config)?,
            root_seed,
            trials,
            aggregate,
            outputs,
            wall_time_s: self.started.elapsed().as_secs_f64(),
        };
        std::fs::write(self.root.join("manifest.json"), serde_json::to_string_pretty(&m)?)?;
        Ok(m)
    }
}

/// A simulation study driven by a serialisable configuration.
pub trait Experiment {
    type Config: Serialize + DeserializeOwned + Clone + std::fmt::Debug;
    const NAME: &'static str;
    const ABOUT: &'static str;

    fn preset(preset: Preset) -> Self::Config;
    fn run(config: &Self::Config, out: &Path) -> Result<Manifest>;
}

/// The sampling protocol of the simulations: `n` points on `[0, 1]`, `n_train` of them for training.
pub fn unit_dataset(f: &TargetFunction, n: usize, n_train: usize, seed: u64) -> Result<Dataset> {
    Dataset::equispaced(f, n, n_train, seed)
}

const SPLIT_TAG: u64 = 0x5350_4c49_5400_0000;

/// Seed of the train/test split for a trial, kept apart from the hidden-layer stream.
pub fn split_seed(root: u64, path: &[u64]) -> u64 {
    let mut p = path.to_vec();
    p.push(SPLIT_TAG);
    seeds::child(root, &p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stats_of_constant() {
        let s = Stats::of(&[2.0, 2.0, 2.0]);
        assert_eq!((s.mean, s.std, s.n), (2.0, 0.0, 3));
        assert!(Stats::of(&[]).mean.is_nan());
    }
}

//! Mean relative training error over a grid of weight ranges and target widths.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{split_seed, unit_dataset, Experiment, Manifest, Preset, RunDir, Stats, TrialRecord};
use crate::activation::Activation;
use crate::error::{Error, Result};
use crate::net::{fmt17, train, ParameterDomain, TrainConfig};
use crate::plot;
use crate::seeds;
use crate::target::TargetFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sim2Config {
    pub lambdas: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub width: usize,
    pub trials: usize,
    pub n_points: usize,
    pub n_train: usize,
    pub activation: String,
    pub svd_threshold: f64,
    pub seed: u64,
    pub plot: bool,
}

impl Sim2Config {
    pub fn desk() -> Self {
        Sim2Config {
            lambdas: vec![0.1, 0.5, 1.0, 5.0, 10.0, 50.0, 100.0, 200.0],
            sigmas: vec![0.01, 0.05, 0.1, 0.5],
            width: 2000,
            trials: 10,
            n_points: 1000,
            n_train: 500,
            activation: "sigmoid".into(),
            svd_threshold: crate::net::DEFAULT_SVD_THRESHOLD,
            seed: 20210602,
            plot: true,
        }
    }

    pub fn full() -> Self {
        Sim2Config {
            width: 10000,
            trials: 50,
            ..Self::desk()
        }
    }
}

/// Mean errors indexed `[lambda][sigma]`, with their statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub lambdas: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub cells: Vec<Vec<Stats>>,
    pub errors: Vec<Vec<Vec<f64>>>,
}

impl Table {
    pub fn cell(&self, lambda: f64, sigma: f64) -> Option<&Stats> {
        let i = self.lambdas.iter().position(|&l| l == lambda)?;
        let j = self.sigmas.iter().position(|&s| s == sigma)?;
        Some(&self.cells[i][j])
    }
}

pub fn trial_seed(root: u64, i: usize, j: usize, t: usize) -> u64 {
    seeds::child(root, &[i as u64, j as u64, t as u64])
}

/// Runs every `(λ, σ, trial)` job and aggregates per cell.
pub fn run_table(config: &Sim2Config) -> Result<Table> {
    if config.trials == 0 {
        return Err(Error::Config("sim2 needs at least one trial".into()));
    }
    let activation = Activation::parse(&config.activation)?;
    let jobs: Vec<(usize, usize, usize)> = (0..config.lambdas.len())
        .flat_map(|i| (0..config.sigmas.len()).flat_map(move |j| (0..config.trials).map(move |t| (i, j, t))))
        .collect();
    let results: Vec<Result<f64>> = jobs
        .par_iter()
        .map(|&(i, j, t)| {
            let f = TargetFunction::sim1(config.sigmas[j]);
            let data = unit_dataset(&f, config.n_points, config.n_train, split_seed(config.seed, &[i as u64, j as u64, t as u64]))?;
            let domain = ParameterDomain::symmetric(config.lambdas[i])?;
            let tc = TrainConfig {
                svd_threshold: config.svd_threshold,
                ..TrainConfig::new(config.width, trial_seed(config.seed, i, j, t))
            };
            let net = train(&data, &domain, &tc, activation)?;
            net.residuals
                .train
                .ok_or_else(|| Error::UndefinedMetric("training error of an empty split".into()))
        })
        .collect();
    let mut errors = vec![vec![Vec::with_capacity(config.trials); config.sigmas.len()]; config.lambdas.len()];
    for (&(i, j, _), r) in jobs.iter().zip(results) {
        errors[i][j].push(r?);
    }
    let cells = errors.iter().map(|row| row.iter().map(|e| Stats::of(e)).collect()).collect();
    Ok(Table {
        lambdas: config.lambdas.clone(),
        sigmas: config.sigmas.clone(),
        cells,
        errors,
    })
}

pub struct Sim2;

impl Experiment for Sim2 {
    type Config = Sim2Config;
    const NAME: &'static str = "sim2";
    const ABOUT: &'static str = "table of mean relative training error over weight range and target width";

    fn preset(preset: Preset) -> Sim2Config {
        match preset {
            Preset::Desk => Sim2Config::desk(),
            Preset::Full => Sim2Config::full(),
        }
    }

    fn run(config: &Sim2Config, out: &Path) -> Result<Manifest> {
        let mut dir = RunDir::create(out)?;
        let table = run_table(config)?;
        let mut header = vec!["lambda".to_string()];
        header.extend(config.sigmas.iter().map(|s| format!("sigma={s}")));
        let wide: Vec<Vec<String>> = table
            .lambdas
            .iter()
            .zip(&table.cells)
            .map(|(l, row)| std::iter::once(fmt17(*l)).chain(row.iter().map(|c| fmt17(c.mean))).collect())
            .collect();
        dir.write_csv("table.csv", &header.iter().map(String::as_str).collect::<Vec<_>>(), &wide)?;
        let mut long = Vec::new();
        let mut summary = Vec::new();
        let mut trials = Vec::new();
        for (i, l) in table.lambdas.iter().enumerate() {
            for (j, s) in table.sigmas.iter().enumerate() {
                for (t, e) in table.errors[i][j].iter().enumerate() {
                    let seed = trial_seed(config.seed, i, j, t);
                    long.push(vec![fmt17(*l), fmt17(*s), t.to_string(), seed.to_string(), fmt17(*e)]);
                    trials.push(
                        TrialRecord::new(format!("lambda{l}_sigma{s}_trial{t}"), seed)
                            .with("lambda", *l)
                            .with("sigma", *s)
                            .with("train_error", *e),
                    );
                }
                let c = table.cells[i][j];
                summary.push(vec![fmt17(*l), fmt17(*s), fmt17(c.mean), fmt17(c.std), fmt17(c.stderr), c.n.to_string()]);
            }
        }
        dir.write_csv("trials.csv", &["lambda", "sigma", "trial", "seed", "train_error"], &long)?;
        dir.write_csv("cells.csv", &["lambda", "sigma", "mean", "std", "stderr", "trials"], &summary)?;
        if config.plot {
            let logs: Vec<f64> = table.cells.iter().flatten().map(|c| c.mean.max(1e-16).log10()).collect();
            let xs: Vec<f64> = (0..table.lambdas.len()).map(|i| i as f64).collect();
            let ys: Vec<f64> = (0..table.sigmas.len()).map(|j| j as f64).collect();
            dir.write_text(
                "table.svg",
                &plot::heatmap("log10 mean training error", "lambda index", "sigma index", &xs, &ys, &logs),
            )?;
        }
        let mut aggregate = BTreeMap::new();
        for (i, l) in table.lambdas.iter().enumerate() {
            for (j, s) in table.sigmas.iter().enumerate() {
                aggregate.insert(format!("lambda{l}_sigma{s}"), table.cells[i][j]);
            }
        }
        dir.finish(Self::NAME, config, config.seed, trials, aggregate)
    }
}

//! Random sigmoid networks with a narrow and a wide weight range on the two-bump target.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{split_seed, unit_dataset, Experiment, Manifest, Preset, RunDir, Stats, TrialRecord};
use crate::activation::Activation;
use crate::error::Result;
use crate::net::{fmt17, train, ParameterDomain, RandomNet, Split, TrainConfig};
use crate::plot::{self, Series};
use crate::seeds;
use crate::target::TargetFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetSpec {
    pub lambda: f64,
    pub width: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sim1Config {
    pub sigma: f64,
    pub n_points: usize,
    pub n_train: usize,
    pub runs: Vec<NetSpec>,
    pub activation: String,
    pub svd_threshold: f64,
    pub seed: u64,
    pub plot: bool,
}

impl Default for Sim1Config {
    fn default() -> Self {
        Sim1Config {
            sigma: 0.05,
            n_points: 1000,
            n_train: 500,
            runs: vec![
                NetSpec { lambda: 1.0, width: 100 },
                NetSpec { lambda: 1.0, width: 500 },
                NetSpec { lambda: 1.0, width: 10000 },
                NetSpec { lambda: 20.0, width: 200 },
            ],
            activation: "sigmoid".into(),
            svd_threshold: crate::net::DEFAULT_SVD_THRESHOLD,
            seed: 20210601,
            plot: true,
        }
    }
}

pub struct Sim1;

/// Per-point rows `x, split, target, prediction`.
pub fn prediction_rows(net: &RandomNet, data: &crate::net::Dataset) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (split, name) in [(Split::Train, "train"), (Split::Test, "test")] {
        let mut idx = data.indices(split);
        idx.sort_unstable();
        for i in idx {
            rows.push(vec![fmt17(data.x[i]), name.to_string(), fmt17(data.y[i]), fmt17(net.predict(data.x[i]))]);
        }
    }
    rows
}

pub fn fit_plot(title: &str, net: &RandomNet, data: &crate::net::Dataset) -> String {
    let mut idx = data.indices(Split::Train);
    idx.sort_unstable();
    let truth = idx.iter().map(|&i| (data.x[i], data.y[i])).collect();
    let pred = idx.iter().map(|&i| (data.x[i], net.predict(data.x[i]))).collect();
    plot::lines(title, "x", "y", &[Series::new("target", truth), Series::new("network", pred)])
}

impl Experiment for Sim1 {
    type Config = Sim1Config;
    const NAME: &'static str = "sim1";
    const ABOUT: &'static str = "narrow versus wide random weight ranges on the two-bump target";

    fn preset(_preset: Preset) -> Sim1Config {
        Sim1Config::default()
    }

    fn run(config: &Sim1Config, out: &Path) -> Result<Manifest> {
        let mut dir = RunDir::create(out)?;
        let f = TargetFunction::sim1(config.sigma);
        let activation = Activation::parse(&config.activation)?;
        let data = unit_dataset(&f, config.n_points, config.n_train, split_seed(config.seed, &[]))?;
        let nets: Vec<Result<(RandomNet, u64)>> = config
            .runs
            .par_iter()
            .enumerate()
            .map(|(k, spec)| {
                let seed = seeds::child(config.seed, &[k as u64]);
                let domain = ParameterDomain::symmetric(spec.lambda)?;
                let tc = TrainConfig {
                    svd_threshold: config.svd_threshold,
                    ..TrainConfig::new(spec.width, seed)
                };
                Ok((train(&data, &domain, &tc, activation)?, seed))
            })
            .collect();
        let mut trials = Vec::new();
        let mut summary = Vec::new();
        for (k, (spec, r)) in config.runs.iter().zip(nets).enumerate() {
            let (net, seed) = r?;
            let stem = format!("run{k}_lambda{}_width{}", spec.lambda, spec.width);
            dir.write_csv(&format!("{stem}.csv"), &["x", "split", "target", "prediction"], &prediction_rows(&net, &data))?;
            if config.plot {
                let title = format!("lambda = {}, width = {}", spec.lambda, spec.width);
                dir.write_text(&format!("{stem}.svg"), &fit_plot(&title, &net, &data))?;
            }
            let train_e = net.residuals.train.unwrap_or(f64::NAN);
            let test_e = net.residuals.test.unwrap_or(f64::NAN);
            summary.push(vec![fmt17(spec.lambda), spec.width.to_string(), fmt17(train_e), fmt17(test_e)]);
            trials.push(
                TrialRecord::new(stem, seed)
                    .with("lambda", spec.lambda)
                    .with("width", spec.width as f64)
                    .with("train_error", train_e)
                    .with("test_error", test_e),
            );
        }
        dir.write_csv("errors.csv", &["lambda", "width", "train_error", "test_error"], &summary)?;
        let mut aggregate = BTreeMap::new();
        let all: Vec<f64> = trials.iter().map(|t| t.metrics["train_error"]).collect();
        aggregate.insert("train_error".into(), Stats::of(&all));
        dir.finish(Self::NAME, config, config.seed, trials, aggregate)
    }
}

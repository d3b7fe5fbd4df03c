//! The two-mode chirp target, its derivative, and pruning of narrow-range neurons.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::sim1::{fit_plot, prediction_rows, NetSpec};
use super::{split_seed, unit_dataset, Experiment, Manifest, Preset, RunDir, Stats, TrialRecord};
use crate::activation::Activation;
use crate::error::Result;
use crate::net::{fmt17, prune_and_refit, train, ParameterDomain, Split, TrainConfig};
use crate::plot::{self, Series};
use crate::seeds;
use crate::target::{chirp_derivative, TargetFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sim3Config {
    pub n_points: usize,
    pub n_train: usize,
    pub narrow: NetSpec,
    pub wide: NetSpec,
    /// Neurons with every hidden parameter in `[−prune_inner, prune_inner]` are removed.
    pub prune_inner: f64,
    pub derivative_points: usize,
    pub activation: String,
    pub svd_threshold: f64,
    pub seed: u64,
    pub plot: bool,
}

impl Default for Sim3Config {
    fn default() -> Self {
        Sim3Config {
            n_points: 1000,
            n_train: 500,
            narrow: NetSpec { lambda: 1.0, width: 10000 },
            wide: NetSpec { lambda: 100.0, width: 300 },
            prune_inner: 30.0,
            derivative_points: 1001,
            activation: "sigmoid".into(),
            svd_threshold: crate::net::DEFAULT_SVD_THRESHOLD,
            seed: 20210603,
            plot: true,
        }
    }
}

pub struct Sim3;

impl Experiment for Sim3 {
    type Config = Sim3Config;
    const NAME: &'static str = "sim3";
    const ABOUT: &'static str = "chirp target: narrow and wide ranges, derivative curve, pruning";

    fn preset(_preset: Preset) -> Sim3Config {
        Sim3Config::default()
    }

    fn run(config: &Sim3Config, out: &Path) -> Result<Manifest> {
        let mut dir = RunDir::create(out)?;
        let g = TargetFunction::chirp();
        let activation = Activation::parse(&config.activation)?;
        let data = unit_dataset(&g, config.n_points, config.n_train, split_seed(config.seed, &[]))?;
        let mut trials = Vec::new();
        let mut nets = Vec::new();
        for (k, (name, spec)) in [("narrow", config.narrow), ("wide", config.wide)].into_iter().enumerate() {
            let seed = seeds::child(config.seed, &[k as u64]);
            let tc = TrainConfig {
                svd_threshold: config.svd_threshold,
                ..TrainConfig::new(spec.width, seed)
            };
            let net = train(&data, &ParameterDomain::symmetric(spec.lambda)?, &tc, activation)?;
            dir.write_csv(&format!("{name}.csv"), &["x", "split", "target", "prediction"], &prediction_rows(&net, &data))?;
            if config.plot {
                let title = format!("lambda = {}, width = {}", spec.lambda, spec.width);
                dir.write_text(&format!("{name}.svg"), &fit_plot(&title, &net, &data))?;
            }
            trials.push(
                TrialRecord::new(name, seed)
                    .with("lambda", spec.lambda)
                    .with("width", spec.width as f64)
                    .with("train_error", net.residuals.train.unwrap_or(f64::NAN))
                    .with("test_error", net.residuals.test.unwrap_or(f64::NAN)),
            );
            nets.push(net);
        }

        let n = config.derivative_points.max(2);
        let curve: Vec<(f64, f64, f64)> = (0..n)
            .map(|i| {
                let x = i as f64 / (n - 1) as f64;
                (x, g.value(x), chirp_derivative(x))
            })
            .collect();
        let max_slope = curve.iter().map(|c| c.2.abs()).fold(0.0, f64::max);
        let rows: Vec<Vec<String>> = curve.iter().map(|&(x, v, d)| vec![fmt17(x), fmt17(v), fmt17(d)]).collect();
        dir.write_csv("derivative.csv", &["x", "g", "g_prime"], &rows)?;
        if config.plot {
            let pts = curve.iter().map(|&(x, _, d)| (x, d)).collect();
            dir.write_text("derivative.svg", &plot::lines("g'(x)", "x", "g'", &[Series::new("g'", pts)]))?;
        }

        let wide = &nets[1];
        let inner = ParameterDomain::symmetric(config.prune_inner)?;
        let (pruned, report) = prune_and_refit(wide, &data, &inner, config.svd_threshold)?;
        let mut idx = data.indices(Split::Train);
        idx.sort_unstable();
        let rows: Vec<Vec<String>> = idx
            .iter()
            .map(|&i| {
                let (y1, y2) = (wide.predict(data.x[i]), pruned.predict(data.x[i]));
                vec![fmt17(data.x[i]), fmt17(y1), fmt17(y2), fmt17(y1 - y2)]
            })
            .collect();
        dir.write_csv("prune.csv", &["x", "full", "pruned", "difference"], &rows)?;
        if config.plot {
            let series: Vec<Series> = [("full", 1), ("pruned", 2), ("difference", 3)]
                .iter()
                .map(|&(l, c)| Series::new(l, rows.iter().map(|r| (r[0].parse().unwrap(), r[c].parse().unwrap())).collect()))
                .collect();
            dir.write_text("prune.svg", &plot::lines("pruning", "x", "y", &series))?;
        }
        trials.push(
            TrialRecord::new("prune", wide.hidden.seed)
                .with("removed", report.removed as f64)
                .with("remaining", report.remaining as f64)
                .with("relative_difference", report.relative_difference)
                .with("pruned_train_error", pruned.residuals.train.unwrap_or(f64::NAN))
                .with("max_abs_derivative", max_slope),
        );
        let mut aggregate = BTreeMap::new();
        aggregate.insert("relative_difference".into(), Stats::of(&[report.relative_difference]));
        dir.finish(Self::NAME, config, config.seed, trials, aggregate)
    }
}

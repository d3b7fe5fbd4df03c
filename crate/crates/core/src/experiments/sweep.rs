//! Closed-form and spectral-tail lower bounds next to the error of trained networks.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Experiment, Manifest, Preset, RunDir, Stats, TrialRecord};
use crate::bounds::{bound_vs_training, BoundMode, BoundRow, BoundTraining};
use crate::error::Result;
use crate::net::fmt17;
use crate::plot::{self, Series};
use crate::ridgelet::make_self_admissible;
use crate::target::TargetFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub target: String,
    pub lambdas: Vec<f64>,
    /// `κ = kappa_factor · λ`.
    pub kappa_factor: f64,
    pub s: f64,
    pub mode: BoundMode,
    pub order: u32,
    pub rho_width: f64,
    pub width: usize,
    pub trials: usize,
    pub n_points: usize,
    pub svd_threshold: f64,
    pub seed: u64,
    pub plot: bool,
}

impl SweepConfig {
    pub fn desk() -> Self {
        SweepConfig {
            target: "sim1:0.05".into(),
            lambdas: vec![0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0],
            kappa_factor: 2.0,
            s: 1.0,
            mode: BoundMode::Corrected,
            order: 2,
            rho_width: 1.0,
            width: 200,
            trials: 3,
            n_points: 1000,
            svd_threshold: crate::net::DEFAULT_SVD_THRESHOLD,
            seed: 20210605,
            plot: true,
        }
    }

    pub fn full() -> Self {
        SweepConfig {
            width: 1000,
            trials: 10,
            ..Self::desk()
        }
    }
}

pub const SWEEP_HEADER: [&str; 13] = [
    "lambda",
    "kappa",
    "s",
    "mode",
    "closed_form",
    "quadrature_tail",
    "empirical_error",
    "vacuous_flag",
    "min_empirical_error",
    "window_error",
    "mean_relative_training_error",
    "violation",
    "trials",
];

pub fn sweep_rows(rows: &[BoundRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            vec![
                fmt17(r.lambda),
                fmt17(r.kappa),
                fmt17(r.s),
                r.mode.name().to_string(),
                fmt17(r.closed_form),
                fmt17(r.quadrature_tail),
                fmt17(r.empirical_error),
                r.vacuous.to_string(),
                fmt17(r.min_empirical_error),
                fmt17(r.window_error),
                fmt17(r.mean_relative_training_error),
                r.violation.to_string(),
                r.trials.to_string(),
            ]
        })
        .collect()
}

pub struct Sweep;

impl Experiment for Sweep {
    type Config = SweepConfig;
    const NAME: &'static str = "sweep";
    const ABOUT: &'static str = "lower bounds against trained networks over a grid of weight ranges";

    fn preset(preset: Preset) -> SweepConfig {
        match preset {
            Preset::Desk => SweepConfig::desk(),
            Preset::Full => SweepConfig::full(),
        }
    }

    fn run(config: &SweepConfig, out: &Path) -> Result<Manifest> {
        let mut dir = RunDir::create(out)?;
        let f = TargetFunction::parse(&config.target)?;
        let profile = make_self_admissible(config.order, config.rho_width, 1)?;
        let boxes: Vec<(f64, f64)> = config.lambdas.iter().map(|&l| (l, config.kappa_factor * l)).collect();
        let training = BoundTraining {
            width: config.width,
            trials: config.trials,
            n_points: config.n_points,
            seed: config.seed,
            svd_threshold: config.svd_threshold,
        };
        let rows = bound_vs_training(&f, &profile.rho, &boxes, &training, config.s, config.mode)?;
        dir.write_csv("bound_sweep.csv", &SWEEP_HEADER, &sweep_rows(&rows))?;
        if config.plot {
            let pick = |g: fn(&BoundRow) -> f64| rows.iter().map(|r| (r.lambda, g(r))).collect::<Vec<_>>();
            let series = vec![
                Series::new("spectral tail", pick(|r| r.quadrature_tail)),
                Series::new("closed form", pick(|r| r.closed_form.max(0.0))),
                Series::new("window error", pick(|r| r.window_error)),
            ];
            dir.write_text("bound_sweep.svg", &plot::lines("lower bounds", "lambda", "squared L2 error", &series))?;
        }
        let trials = rows
            .iter()
            .map(|r| {
                TrialRecord::new(format!("lambda{}", r.lambda), config.seed)
                    .with("quadrature_tail", r.quadrature_tail)
                    .with("closed_form", r.closed_form)
                    .with("empirical_error", r.empirical_error)
                    .with("min_empirical_error", r.min_empirical_error)
                    .with("window_error", r.window_error)
                    .with("violation", if r.violation { 1.0 } else { 0.0 })
            })
            .collect();
        let mut aggregate = BTreeMap::new();
        let v: Vec<f64> = rows.iter().map(|r| if r.violation { 1.0 } else { 0.0 }).collect();
        aggregate.insert("violation".into(), Stats::of(&v));
        dir.finish(Self::NAME, config, config.seed, trials, aggregate)
    }
}

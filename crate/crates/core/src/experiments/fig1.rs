//! Hidden parameters of gradient-descent nets next to the ridgelet spectrum of their target.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Experiment, Manifest, Preset, RunDir, Stats, TrialRecord};
use crate::error::{Error, Result};
use crate::net::{fmt17, gd_train, Dataset, GdConfig};
use crate::plot;
use crate::quad::QuadratureSpec;
use crate::ridgelet::{make_self_admissible, spectrum_grid};
use crate::seeds;
use crate::target::TargetFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig1Config {
    pub n_points: usize,
    pub nets: usize,
    pub width: usize,
    pub steps: usize,
    pub learning_rate: f64,
    pub init_scale: f64,
    /// Order and width of the self-admissible Gaussian derivative used as activation and as `ρ`.
    pub order: u32,
    pub rho_width: f64,
    pub a_range: (f64, f64),
    pub b_range: (f64, f64),
    pub resolution: (usize, usize),
    pub rel_tol: f64,
    pub seed: u64,
    pub plot: bool,
}

impl Fig1Config {
    pub fn desk() -> Self {
        Fig1Config {
            n_points: 100,
            nets: 100,
            width: 10,
            steps: 20000,
            learning_rate: 0.05,
            init_scale: 0.5,
            order: 2,
            rho_width: 1.0,
            a_range: (-30.0, 30.0),
            b_range: (-40.0, 40.0),
            resolution: (121, 161),
            rel_tol: 1e-8,
            seed: 20210604,
            plot: true,
        }
    }

    pub fn full() -> Self {
        Fig1Config {
            steps: 200000,
            ..Self::desk()
        }
    }
}

pub struct Fig1;

impl Experiment for Fig1 {
    type Config = Fig1Config;
    const NAME: &'static str = "fig1";
    const ABOUT: &'static str = "gradient-descent parameter cloud and ridgelet spectrum of sin(2 pi x)";

    fn preset(preset: Preset) -> Fig1Config {
        match preset {
            Preset::Desk => Fig1Config::desk(),
            Preset::Full => Fig1Config::full(),
        }
    }

    fn run(config: &Fig1Config, out: &Path) -> Result<Manifest> {
        if config.nets == 0 {
            return Err(Error::Config("fig1 needs at least one network".into()));
        }
        let mut dir = RunDir::create(out)?;
        let f = TargetFunction::windowed_sine(2.0 * PI, 0.0, 1.0);
        let profile = make_self_admissible(config.order, config.rho_width, 1)?;
        let data = Dataset::equispaced(&f, config.n_points, config.n_points, config.seed)?;
        let runs: Vec<(u64, Result<crate::net::GdResult>)> = (0..config.nets)
            .into_par_iter()
            .map(|k| {
                let seed = seeds::child(config.seed, &[k as u64]);
                let gd = GdConfig {
                    width: config.width,
                    steps: config.steps,
                    learning_rate: config.learning_rate,
                    seed,
                    activation: profile.sigma,
                    init_scale: config.init_scale,
                };
                (seed, gd_train(&data, &gd))
            })
            .collect();
        let mut trials = Vec::new();
        let mut rows = Vec::new();
        let mut cloud = Vec::new();
        let mut skipped = 0usize;
        let mut losses = Vec::new();
        for (k, (seed, r)) in runs.into_iter().enumerate() {
            match r {
                Ok(res) => {
                    for (j, &(a, b, c)) in res.params.iter().enumerate() {
                        rows.push(vec![k.to_string(), j.to_string(), fmt17(a), fmt17(b), fmt17(c)]);
                        cloud.push((a, b, c));
                    }
                    losses.push(res.final_loss);
                    trials.push(
                        TrialRecord::new(format!("net{k}"), seed)
                            .with("initial_loss", res.initial_loss)
                            .with("final_loss", res.final_loss),
                    );
                }
                Err(Error::Divergence { .. }) => {
                    skipped += 1;
                    trials.push(TrialRecord::new(format!("net{k}"), seed).with("diverged", 1.0));
                }
                Err(e) => return Err(e),
            }
        }
        dir.write_csv("scatter.csv", &["net", "unit", "a", "b", "c"], &rows)?;

        let spec = QuadratureSpec::with_tol(config.rel_tol);
        let grid = spectrum_grid(&f, &profile.rho, config.a_range, config.b_range, config.resolution, &spec)?;
        grid.write_csv(dir.path("spectrum.csv"))?;
        dir.track("spectrum.csv");
        grid.write_metadata(dir.path("spectrum.json"))?;
        dir.track("spectrum.json");
        let energy = grid.riemann_energy();
        let l2_sq = f.l2_norm()?.value.powi(2);
        if config.plot {
            dir.write_text("scatter.svg", &plot::scatter("trained (a, b), coloured by c", "a", "b", &cloud))?;
            dir.write_text(
                "spectrum.svg",
                &plot::heatmap("|R[f](a, b)|", "a", "b", &grid.a, &grid.b, &grid.magnitudes()),
            )?;
        }
        trials.push(
            TrialRecord::new("spectrum", config.seed)
                .with("riemann_energy", energy)
                .with("target_energy", l2_sq)
                .with("relative_energy_gap", (energy - l2_sq).abs() / l2_sq)
                .with("failed_cells", grid.meta.failed_cells as f64)
                .with("skipped_nets", skipped as f64),
        );
        let mut aggregate = BTreeMap::new();
        aggregate.insert("final_loss".into(), Stats::of(&losses));
        dir.finish(Self::NAME, config, config.seed, trials, aggregate)
    }
}

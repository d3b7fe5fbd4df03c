//! Single-shot computations that share the run-directory plumbing of the simulations.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{split_seed, unit_dataset, Experiment, Manifest, Preset, RunDir, TrialRecord};
use crate::activation::Activation;
use crate::bounds::{compute_constants, lower_bound_closed_form, tail_bound_quadrature, theta, BoundMode};
use crate::error::{Error, Result};
use crate::net::{fmt17, train, ParameterDomain, TrainConfig, DEFAULT_SVD_THRESHOLD};
use crate::plot::{self, Series};
use crate::quad::QuadratureSpec;
use crate::ridgelet::{
    admissibility_constant, make_self_admissible, normalize_against, plancherel, reconstruct_many, self_admissible_scale,
    spectrum_grid, AdmissiblePair, ReconstructionOptions,
};
use crate::target::TargetFunction;

use super::sim1::{fit_plot, prediction_rows};

/// The self-admissible rescaling of a Gaussian-derivative descriptor.
pub fn self_admissible_rho(descriptor: &str, m: usize) -> Result<Activation> {
    match Activation::parse(descriptor)? {
        Activation::GaussianDerivative { order, width, .. } => Ok(make_self_admissible(order, width, m)?.rho),
        other => Err(Error::Precondition(format!(
            "self-admissible normalisation needs a Gaussian derivative, got {}",
            other.descriptor()
        ))),
    }
}

fn no_aggregate() -> BTreeMap<String, super::Stats> {
    BTreeMap::new()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainToolConfig {
    pub target: String,
    pub n_points: usize,
    pub n_train: usize,
    pub lambda: f64,
    /// Bias range; `null` means `κ = 2λ`.
    pub kappa: Option<f64>,
    pub width: usize,
    pub activation: String,
    pub svd_threshold: f64,
    pub seed: u64,
    pub plot: bool,
}

impl Default for TrainToolConfig {
    fn default() -> Self {
        TrainToolConfig {
            target: "sim1:0.05".into(),
            n_points: 1000,
            n_train: 500,
            lambda: 20.0,
            kappa: None,
            width: 200,
            activation: "sigmoid".into(),
            svd_threshold: DEFAULT_SVD_THRESHOLD,
            seed: 1,
            plot: true,
        }
    }
}

pub struct Train;

impl Experiment for Train {
    type Config = TrainToolConfig;
    const NAME: &'static str = "train";
    const ABOUT: &'static str = "fit one random-feature network on [0, 1] and report its errors";

    fn preset(_preset: Preset) -> Self::Config {
        TrainToolConfig::default()
    }

    fn run(config: &Self::Config, out: &Path) -> Result<Manifest> {
        let mut dir = RunDir::create(out)?;
        let f = TargetFunction::parse(&config.target)?;
        let activation = Activation::parse(&config.activation)?;
        let data = unit_dataset(&f, config.n_points, config.n_train, split_seed(config.seed, &[]))?;
        let domain = ParameterDomain::new(config.lambda, config.kappa.unwrap_or(2.0 * config.lambda))?;
        let tc = TrainConfig {
            svd_threshold: config.svd_threshold,
            ..TrainConfig::new(config.width, config.seed)
        };
        let net = train(&data, &domain, &tc, activation)?;
        dir.write_csv("predictions.csv", &["x", "split", "target", "prediction"], &prediction_rows(&net, &data))?;
        dir.write_text("net.json", &net.to_json()?)?;
        if config.plot {
            let title = format!("lambda = {}, width = {}", config.lambda, config.width);
            dir.write_text("predictions.svg", &fit_plot(&title, &net, &data))?;
        }
        let trial = TrialRecord::new("net", config.seed)
            .with("train_error", net.residuals.train.unwrap_or(f64::NAN))
            .with("test_error", net.residuals.test.unwrap_or(f64::NAN))
            .with("output_weight_norm", crate::net::norm(&net.c));
        dir.finish(Self::NAME, config, config.seed, vec![trial], no_aggregate())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub target: String,
    /// Gaussian derivative, rescaled to be admissible with itself.
    pub rho: String,
    pub a_range: (f64, f64),
    pub b_range: (f64, f64),
    pub resolution: (usize, usize),
    pub rel_tol: f64,
    pub plot: bool,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            target: "gaussian:0.5,0.1,1".into(),
            rho: "dgauss:1,1".into(),
            a_range: (-40.0, 40.0),
            b_range: (-40.0, 40.0),
            resolution: (81, 81),
            rel_tol: 1e-8,
            plot: true,
        }
    }
}

pub struct Spectrum;

impl Experiment for Spectrum {
    type Config = SpectrumConfig;
    const NAME: &'static str = "spectrum";
    const ABOUT: &'static str = "ridgelet transform of a target on a regular (a, b) grid";

    fn preset(_preset: Preset) -> Self::Config {
        SpectrumConfig::default()
    }

    fn run(config: &Self::Config, out: &Path) -> Result<Manifest> {
        let mut dir = RunDir::create(out)?;
        let f = TargetFunction::parse(&config.target)?;
        let rho = self_admissible_rho(&config.rho, 1)?;
        let grid = spectrum_grid(&f, &rho, config.a_range, config.b_range, config.resolution, &QuadratureSpec::with_tol(config.rel_tol))?;
        grid.write_csv(dir.path("spectrum.csv"))?;
        dir.track("spectrum.csv");
        grid.write_metadata(dir.path("spectrum.json"))?;
        dir.track("spectrum.json");
        if config.plot {
            dir.write_text("spectrum.svg", &plot::heatmap("|R[f](a, b)|", "a", "b", &grid.a, &grid.b, &grid.magnitudes()))?;
        }
        let trial = TrialRecord::new("grid", 0)
            .with("riemann_energy", grid.riemann_energy())
            .with("target_energy", f.l2_norm()?.value.powi(2))
            .with("failed_cells", grid.meta.failed_cells as f64);
        dir.finish(Self::NAME, config, 0, vec![trial], no_aggregate())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdmissibleConfig {
    pub rho: String,
    /// Activation paired with `rho`; empty pairs `rho` with itself.
    pub sigma: String,
    pub m: usize,
}

impl Default for AdmissibleConfig {
    fn default() -> Self {
        AdmissibleConfig {
            rho: "dgauss:1,1".into(),
            sigma: String::new(),
            m: 1,
        }
    }
}

pub struct Admissible;

impl Experiment for Admissible {
    type Config = AdmissibleConfig;
    const NAME: &'static str = "admissible";
    const ABOUT: &'static str = "admissibility constant of (sigma, rho) and the normalisation making it 1";

    fn preset(_preset: Preset) -> Self::Config {
        AdmissibleConfig::default()
    }

    fn run(config: &Self::Config, out: &Path) -> Result<Manifest> {
        let dir = RunDir::create(out)?;
        let rho = Activation::parse(&config.rho)?;
        let spec = QuadratureSpec::with_tol(1e-12);
        let mut trial = TrialRecord::new("pair", 0);
        if config.sigma.trim().is_empty() {
            let raw = admissibility_constant(&rho, &rho, config.m, &spec)?;
            if !(raw > 0.0) {
                return Err(Error::NotAdmissible(format!("{} paired with itself has constant {raw}", rho.descriptor())));
            }
            let factor = 1.0 / raw.sqrt();
            let normalized = rho.scaled(factor)?;
            let k = admissibility_constant(&normalized, &normalized, config.m, &spec)?;
            trial = trial.with("raw_constant", raw).with("constant", k);
            if let Activation::GaussianDerivative { order, width, scale } = rho {
                trial = trial
                    .with("scale", scale * factor)
                    .with("scale_closed_form", self_admissible_scale(order, width, config.m)?);
            }
        } else {
            let sigma = Activation::parse(&config.sigma)?;
            let raw = admissibility_constant(&sigma, &rho, config.m, &spec)?;
            let normalized = normalize_against(&sigma, &rho, config.m)?;
            let k = admissibility_constant(&sigma, &normalized, config.m, &spec)?;
            trial = trial.with("raw_constant", raw).with("constant", k).with("normalization", 1.0 / raw);
        }
        dir.finish(Self::NAME, config, 0, vec![trial], no_aggregate())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructConfig {
    pub target: String,
    /// Synthesis activation; empty uses the self-admissible `rho`.
    pub sigma: String,
    pub rho: String,
    pub points: usize,
    pub tail_tol: f64,
    pub max_a: f64,
    pub a_box: Option<f64>,
    pub plot: bool,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        let o = ReconstructionOptions::default();
        ReconstructConfig {
            target: "gaussian:0.5,0.1,1".into(),
            sigma: "gaussian:1".into(),
            rho: "dgauss:2,1".into(),
            points: 201,
            tail_tol: o.tail_tol,
            max_a: o.max_a,
            a_box: o.a_box,
            plot: true,
        }
    }
}

pub fn reconstruction_pair(sigma: &str, rho: &str) -> Result<AdmissiblePair> {
    if sigma.trim().is_empty() {
        let rho = self_admissible_rho(rho, 1)?;
        AdmissiblePair::new(rho, rho, 1)
    } else {
        AdmissiblePair::normalized(Activation::parse(sigma)?, Activation::parse(rho)?)
    }
}

pub struct Reconstruct;

impl Experiment for Reconstruct {
    type Config = ReconstructConfig;
    const NAME: &'static str = "reconstruct";
    const ABOUT: &'static str = "synthesise the ridgelet transform back and compare with the target";

    fn preset(_preset: Preset) -> Self::Config {
        ReconstructConfig::default()
    }

    fn run(config: &Self::Config, out: &Path) -> Result<Manifest> {
        if config.points < 2 {
            return Err(Error::Config("reconstruct needs at least 2 points".into()));
        }
        let mut dir = RunDir::create(out)?;
        let f = TargetFunction::parse(&config.target)?;
        let pair = reconstruction_pair(&config.sigma, &config.rho)?;
        let opts = ReconstructionOptions {
            tail_tol: config.tail_tol,
            max_a: config.max_a,
            a_box: config.a_box,
        };
        let (lo, hi) = f.effective_support();
        let xs: Vec<f64> = (0..config.points).map(|i| lo + (hi - lo) * i as f64 / (config.points - 1) as f64).collect();
        let ys = reconstruct_many(&f, &pair, &xs, &opts)?;
        let truth: Vec<f64> = xs.iter().map(|&x| f.value(x)).collect();
        let rows: Vec<Vec<String>> = xs
            .iter()
            .zip(&truth)
            .zip(&ys)
            .map(|((x, t), y)| vec![fmt17(*x), fmt17(*t), fmt17(*y)])
            .collect();
        dir.write_csv("reconstruction.csv", &["x", "target", "reconstruction"], &rows)?;
        if config.plot {
            let series = vec![
                Series::new("target", xs.iter().copied().zip(truth.iter().copied()).collect()),
                Series::new("reconstruction", xs.iter().copied().zip(ys.iter().copied()).collect()),
            ];
            dir.write_text("reconstruction.svg", &plot::lines("reconstruction", "x", "f", &series))?;
        }
        let rel = crate::net::relative_error(&ys, &truth)?;
        let sup = ys.iter().zip(&truth).map(|(y, t)| (y - t).abs()).fold(0.0, f64::max);
        let trial = TrialRecord::new("grid", 0)
            .with("relative_l2_error", rel)
            .with("sup_error", sup)
            .with("admissibility_constant", pair.k_adm);
        dir.finish(Self::NAME, config, 0, vec![trial], no_aggregate())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlancherelConfig {
    pub target: String,
    /// Gaussian derivative, rescaled to be admissible with itself.
    pub rho: String,
    pub rel_tol: f64,
}

impl Default for PlancherelConfig {
    fn default() -> Self {
        PlancherelConfig {
            target: "gaussian:0.5,0.1,1".into(),
            rho: "dgauss:1,1".into(),
            rel_tol: 1e-8,
        }
    }
}

pub struct Plancherel;

impl Experiment for Plancherel {
    type Config = PlancherelConfig;
    const NAME: &'static str = "plancherel";
    const ABOUT: &'static str = "relative gap between the L2 norms of a target and of its ridgelet transform";

    fn preset(_preset: Preset) -> Self::Config {
        PlancherelConfig::default()
    }

    fn run(config: &Self::Config, out: &Path) -> Result<Manifest> {
        let dir = RunDir::create(out)?;
        let f = TargetFunction::parse(&config.target)?;
        let rho = self_admissible_rho(&config.rho, 1)?;
        let r = plancherel(&f, &rho, &QuadratureSpec::with_tol(config.rel_tol))?;
        let trial = TrialRecord::new("norms", 0)
            .with("gap", r.gap)
            .with("target_norm", r.target_norm)
            .with("transform_norm", r.transform_norm)
            .with("box_a", r.box_a)
            .with("inside", r.inside)
            .with("outside", r.outside);
        dir.finish(Self::NAME, config, 0, vec![trial], no_aggregate())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundConfig {
    pub target: String,
    pub s: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub mode: BoundMode,
    /// Gaussian derivative, rescaled to be admissible with itself.
    pub rho: String,
    pub rel_tol: f64,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            target: "gaussian:0.5,0.1,1".into(),
            s: 1.0,
            lambda: 2.0,
            kappa: 4.0,
            mode: BoundMode::Corrected,
            rho: "dgauss:2,1".into(),
            rel_tol: 1e-9,
        }
    }
}

pub struct Bound;

impl Experiment for Bound {
    type Config = BoundConfig;
    const NAME: &'static str = "bound";
    const ABOUT: &'static str = "decay constants, closed-form lower bound and spectral tail for one parameter box";

    fn preset(_preset: Preset) -> Self::Config {
        BoundConfig::default()
    }

    fn run(config: &Self::Config, out: &Path) -> Result<Manifest> {
        let dir = RunDir::create(out)?;
        let f = TargetFunction::parse(&config.target)?;
        let rho = self_admissible_rho(&config.rho, 1)?;
        let spec = QuadratureSpec::with_tol(config.rel_tol);
        let c = compute_constants(&f, &rho, config.s, 1, &spec)?;
        let closed = lower_bound_closed_form(&c, config.lambda, config.kappa, config.mode)?;
        let tail = tail_bound_quadrature(&f, &rho, config.lambda, config.kappa, &spec)?;
        let constants = TrialRecord::new("constants", 0)
            .with("c0", c.c0)
            .with("c_rho_s", c.c_rho_s)
            .with("c_f_s_plus", c.c_f_s_plus)
            .with("c_f_s_minus", c.c_f_s_minus)
            .with("sobolev_norm", c.sobolev_norm)
            .with("c_inf", c.c_inf_for(config.mode))
            .with("theta", theta(&c, config.mode)?)
            .with("l2_sq", c.l2_sq);
        let bounds = TrialRecord::new("bounds", 0)
            .with("closed_form", closed)
            .with("quadrature_tail", tail)
            .with("vacuous", if closed <= 0.0 { 1.0 } else { 0.0 });
        dir.finish(Self::NAME, config, 0, vec![constants, bounds], no_aggregate())
    }
}

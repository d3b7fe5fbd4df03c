//! Shallow networks `g(x) = Σ_j c_j σ(a_j·x − b_j)` whose hidden parameters
//! are drawn once and frozen, with output weights fitted by least squares.

use faer::Mat;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::activation::{unit_ball_volume, Activation};
use crate::error::{Error, Result};
use crate::seeds;
use crate::target::TargetFunction;

/// The box `{|a| ≤ λ, |b| ≤ κ/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterDomain {
    pub lambda: f64,
    pub kappa: f64,
    #[serde(default = "one")]
    pub dim: usize,
}

fn one() -> usize {
    1
}

impl ParameterDomain {
    pub fn new(lambda: f64, kappa: f64) -> Result<Self> {
        Self::with_dim(lambda, kappa, 1)
    }

    /// Biases share the weight range: `κ = 2λ`.
    pub fn symmetric(lambda: f64) -> Result<Self> {
        Self::new(lambda, 2.0 * lambda)
    }

    pub fn with_dim(lambda: f64, kappa: f64, dim: usize) -> Result<Self> {
        let d = ParameterDomain { lambda, kappa, dim };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite() && self.kappa >= 0.0 && self.kappa.is_finite()) {
            return Err(Error::Config(format!(
                "parameter domain needs finite lambda, kappa >= 0, got ({}, {})",
                self.lambda, self.kappa
            )));
        }
        if self.dim == 0 {
            return Err(Error::Config("parameter domain dimension must be positive".into()));
        }
        Ok(())
    }

    /// `V_m λ^m κ`.
    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim) * self.lambda.powi(self.dim as i32) * self.kappa
    }

    pub fn contains(&self, a: &[f64], b: f64) -> bool {
        let r2: f64 = a.iter().map(|v| v * v).sum();
        r2.sqrt() <= self.lambda * (1.0 + 1e-15) && b.abs() <= 0.5 * self.kappa
    }

    /// Whether `(a, b)` lies in the box `|a|_∞ ≤ λ`, `|b| ≤ κ/2`.
    pub fn contains_box(&self, a: &[f64], b: f64) -> bool {
        a.iter().all(|v| v.abs() <= self.lambda) && b.abs() <= 0.5 * self.kappa
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiddenLayer {
    /// Row-major `p × m` input weights.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub seed: u64,
    pub domain: ParameterDomain,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excluded: Option<ParameterDomain>,
}

impl HiddenLayer {
    pub fn width(&self) -> usize {
        self.b.len()
    }

    pub fn dim(&self) -> usize {
        self.domain.dim
    }

    pub fn weights(&self, j: usize) -> &[f64] {
        let m = self.dim();
        &self.a[j * m..(j + 1) * m]
    }

    /// The first `p` neurons.
    pub fn truncated(&self, p: usize) -> HiddenLayer {
        let p = p.min(self.width());
        HiddenLayer {
            a: self.a[..p * self.dim()].to_vec(),
            b: self.b[..p].to_vec(),
            ..self.clone()
        }
    }

    pub fn select(&self, keep: &[usize]) -> HiddenLayer {
        let m = self.dim();
        let mut a = Vec::with_capacity(keep.len() * m);
        for &j in keep {
            a.extend_from_slice(self.weights(j));
        }
        HiddenLayer {
            a,
            b: keep.iter().map(|&j| self.b[j]).collect(),
            ..self.clone()
        }
    }
}

fn draw_pair<R: Rng>(rng: &mut R, domain: &ParameterDomain, a: &mut Vec<f64>) -> f64 {
    let m = domain.dim;
    if m == 1 {
        let u: f64 = rng.random();
        a.push(domain.lambda * (2.0 * u - 1.0));
    } else {
        let dir: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let radius = domain.lambda * rng.random::<f64>().powf(1.0 / m as f64);
        a.extend(dir.iter().map(|v| v / norm * radius));
    }
    let u: f64 = rng.random();
    domain.kappa * (u - 0.5)
}

/// Draws `p` i.i.d. pairs from the uniform distribution on `domain`.
pub fn sample_hidden(domain: &ParameterDomain, p: usize, seed: u64) -> Result<HiddenLayer> {
    domain.validate()?;
    let mut rng = seeds::rng(seed);
    let mut a = Vec::with_capacity(p * domain.dim);
    let mut b = Vec::with_capacity(p);
    for _ in 0..p {
        b.push(draw_pair(&mut rng, domain, &mut a));
    }
    Ok(HiddenLayer {
        a,
        b,
        seed,
        domain: *domain,
        excluded: None,
    })
}

/// Uniform on `outer` with the box `inner` removed, by rejection.
pub fn sample_hidden_excluding(
    outer: &ParameterDomain,
    inner: &ParameterDomain,
    p: usize,
    seed: u64,
) -> Result<HiddenLayer> {
    outer.validate()?;
    inner.validate()?;
    if inner.dim != outer.dim {
        return Err(Error::Config("inner and outer domains differ in dimension".into()));
    }
    if inner.lambda > outer.lambda || inner.kappa > outer.kappa || inner == outer {
        return Err(Error::Config(format!(
            "excluded box (lambda {}, kappa {}) must lie strictly inside (lambda {}, kappa {})",
            inner.lambda, inner.kappa, outer.lambda, outer.kappa
        )));
    }
    let m = outer.dim as i32;
    let outer_a = unit_ball_volume(outer.dim) * outer.lambda.powi(m);
    let inner_a = (2.0 * inner.lambda).powi(m).min(outer_a);
    let rejected = if outer_a > 0.0 && outer.kappa > 0.0 {
        (inner_a / outer_a).min(1.0) * (inner.kappa / outer.kappa)
    } else {
        1.0
    };
    let acceptance = 1.0 - rejected;
    if acceptance < 1e-3 {
        return Err(Error::Config(format!(
            "rejection sampler acceptance {acceptance:.3e} is below 1e-3"
        )));
    }
    let mut rng = seeds::rng(seed);
    let mut a = Vec::with_capacity(p * outer.dim);
    let mut b = Vec::with_capacity(p);
    let mut scratch = Vec::with_capacity(outer.dim);
    while b.len() < p {
        scratch.clear();
        let bj = draw_pair(&mut rng, outer, &mut scratch);
        if inner.contains_box(&scratch, bj) {
            continue;
        }
        a.extend_from_slice(&scratch);
        b.push(bj);
    }
    Ok(HiddenLayer {
        a,
        b,
        seed,
        domain: *outer,
        excluded: Some(*inner),
    })
}

/// `G[i, j] = σ(a_j · x_i − b_j)` for row-major inputs `x` of dimension `m`.
pub fn design_matrix(hidden: &HiddenLayer, x: &[f64], activation: &Activation) -> Mat<f64> {
    let m = hidden.dim();
    let n = x.len() / m;
    Mat::from_fn(n, hidden.width(), |i, j| {
        let xi = &x[i * m..(i + 1) * m];
        let z: f64 = hidden.weights(j).iter().zip(xi).map(|(a, v)| a * v).sum::<f64>() - hidden.b[j];
        activation.eval(z)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Solver {
    MinNormSvd,
    Ridge { epsilon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub width: usize,
    pub solver: Solver,
    /// Singular values below `threshold · σ_max` count as zero.
    pub svd_threshold: f64,
    pub seed: u64,
}

impl TrainConfig {
    pub fn new(width: usize, seed: u64) -> Self {
        TrainConfig {
            width,
            solver: Solver::MinNormSvd,
            svd_threshold: DEFAULT_SVD_THRESHOLD,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 {
            return Err(Error::Config("hidden width must be at least 1".into()));
        }
        if !(self.svd_threshold > 0.0 && self.svd_threshold < 1.0) {
            return Err(Error::Config(format!(
                "svd threshold must lie in (0, 1), got {}",
                self.svd_threshold
            )));
        }
        if let Solver::Ridge { epsilon } = self.solver {
            if !(epsilon >= 0.0 && epsilon.is_finite()) {
                return Err(Error::Config(format!("ridge epsilon must be >= 0, got {epsilon}")));
            }
        }
        Ok(())
    }
}

pub const DEFAULT_SVD_THRESHOLD: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub residual_norm: f64,
    pub target_norm: f64,
    pub rank: usize,
    pub largest_singular_value: f64,
    /// The design matrix was identically zero.
    pub zero_design: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub c: Vec<f64>,
    pub report: FitReport,
}

/// The SVD kernels return with dirty upper vector registers, which makes every
/// later SSE instruction on this thread pay a transition penalty.
fn clear_upper_registers() {
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("avx") {
        #[target_feature(enable = "avx")]
        unsafe fn zeroupper() {
            std::arch::x86_64::_mm256_zeroupper()
        }
        // SAFETY: the feature was detected at runtime
        unsafe { zeroupper() }
    }
}

/// Least-squares output weights for `design · c ≈ y`.
pub fn fit_output(design: &Mat<f64>, y: &[f64], solver: Solver, svd_threshold: f64) -> Result<Fit> {
    let (n, p) = (design.nrows(), design.ncols());
    if y.len() != n {
        return Err(Error::Precondition(format!("design has {n} rows but y has {}", y.len())));
    }
    if (0..p).any(|j| (0..n).any(|i| !design[(i, j)].is_finite())) || y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Precondition("design matrix and targets must be finite".into()));
    }
    let target_norm = norm(y);
    let zero_design = (0..p).all(|j| (0..n).all(|i| design[(i, j)] == 0.0));
    if p == 0 || zero_design {
        return Ok(Fit {
            c: vec![0.0; p],
            report: FitReport {
                residual_norm: target_norm,
                target_norm,
                rank: 0,
                largest_singular_value: 0.0,
                zero_design: true,
            },
        });
    }
    let svd = design
        .thin_svd()
        .map_err(|e| Error::LinearAlgebra(format!("thin SVD did not converge: {e:?}")));
    clear_upper_registers();
    let svd = svd?;
    let (u, s, v) = (svd.U(), svd.S(), svd.V());
    let k = s.dim();
    let smax = (0..k).map(|i| s[i]).fold(0.0, f64::max);
    let mut c = vec![0.0; p];
    let mut rank = 0;
    for i in 0..k {
        let si = s[i];
        let factor = match solver {
            Solver::MinNormSvd => {
                if si <= svd_threshold * smax {
                    continue;
                }
                1.0 / si
            }
            Solver::Ridge { epsilon } if epsilon == 0.0 => {
                if si <= 0.0 {
                    continue;
                }
                1.0 / si
            }
            Solver::Ridge { epsilon } => si / (si * si + epsilon),
        };
        rank += 1;
        let mut proj = 0.0;
        for r in 0..n {
            proj += u[(r, i)] * y[r];
        }
        let w = proj * factor;
        for (j, cj) in c.iter_mut().enumerate() {
            *cj += v[(j, i)] * w;
        }
    }
    let pred = mat_vec(design, &c);
    let residual_norm = norm(&pred.iter().zip(y).map(|(p, t)| p - t).collect::<Vec<_>>());
    Ok(Fit {
        c,
        report: FitReport {
            residual_norm,
            target_norm,
            rank,
            largest_singular_value: smax,
            zero_design: false,
        },
    })
}

pub fn mat_vec(m: &Mat<f64>, c: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; m.nrows()];
    for (j, &cj) in c.iter().enumerate() {
        if cj == 0.0 {
            continue;
        }
        let col = m.col(j);
        for (i, o) in out.iter_mut().enumerate() {
            *o += col[i] * cj;
        }
    }
    out
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `‖pred − target‖₂ / ‖target‖₂`.
pub fn relative_error(pred: &[f64], target: &[f64]) -> Result<f64> {
    let t = norm(target);
    if !(t > 0.0) {
        return Err(Error::UndefinedMetric("relative error of a zero target vector".into()));
    }
    let d: f64 = pred.iter().zip(target).map(|(p, y)| (p - y) * (p - y)).sum::<f64>().sqrt();
    Ok(d / t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
    All,
}

impl Dataset {
    /// `n` equally spaced points on `[0, 1]`, randomly split into `n_train` and the rest.
    pub fn equispaced(f: &TargetFunction, n: usize, n_train: usize, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config("a dataset needs at least two points".into()));
        }
        let x: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let y = x.iter().map(|&v| f.eval(v)).collect::<Result<Vec<_>>>()?;
        Self::from_samples(x, y, n_train, seed)
    }

    pub fn from_samples(x: Vec<f64>, y: Vec<f64>, n_train: usize, seed: u64) -> Result<Self> {
        let n = x.len();
        if y.len() != n || n_train > n {
            return Err(Error::Config(format!(
                "dataset of {n} inputs, {} targets cannot hold {n_train} training points",
                y.len()
            )));
        }
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut seeds::rng(seed));
        let test = idx.split_off(n_train);
        Ok(Dataset {
            x,
            y,
            train: idx,
            test,
            seed,
        })
    }

    pub fn indices(&self, split: Split) -> Vec<usize> {
        match split {
            Split::Train => self.train.clone(),
            Split::Test => self.test.clone(),
            Split::All => (0..self.x.len()).collect(),
        }
    }

    pub fn inputs(&self, split: Split) -> Vec<f64> {
        self.indices(split).iter().map(|&i| self.x[i]).collect()
    }

    pub fn targets(&self, split: Split) -> Vec<f64> {
        self.indices(split).iter().map(|&i| self.y[i]).collect()
    }

    pub fn write_csv(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
        w.write_record(["x", "y", "split"])?;
        let mut label = vec!["test"; self.x.len()];
        for &i in &self.train {
            label[i] = "train";
        }
        for i in 0..self.x.len() {
            w.write_record([fmt17(self.x[i]), fmt17(self.y[i]), label[i].to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Fixed 17-significant-digit float formatting for every CSV the crate writes.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub train: Option<f64>,
    pub test: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomNet {
    pub hidden: HiddenLayer,
    pub c: Vec<f64>,
    pub activation: Activation,
    pub solver: Solver,
    pub residuals: Residuals,
}

#[derive(Serialize, Deserialize)]
struct NetDocument {
    seed: u64,
    domain: ParameterDomain,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    excluded: Option<ParameterDomain>,
    activation: Activation,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    solver: Solver,
    residuals: Residuals,
}

impl RandomNet {
    pub fn width(&self) -> usize {
        self.c.len()
    }

    pub fn predict(&self, x: f64) -> f64 {
        self.predict_point(std::slice::from_ref(&x))
    }

    pub fn predict_point(&self, x: &[f64]) -> f64 {
        let h = &self.hidden;
        (0..h.width())
            .map(|j| {
                let z: f64 = h.weights(j).iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - h.b[j];
                self.c[j] * self.activation.eval(z)
            })
            .sum()
    }

    pub fn predict_many(&self, xs: &[f64]) -> Vec<f64> {
        xs.chunks(self.hidden.dim()).map(|p| self.predict_point(p)).collect()
    }

    pub fn relative_error(&self, data: &Dataset, split: Split) -> Result<f64> {
        relative_error(&self.predict_many(&data.inputs(split)), &data.targets(split))
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = NetDocument {
            seed: self.hidden.seed,
            domain: self.hidden.domain,
            excluded: self.hidden.excluded,
            activation: self.activation,
            a: self.hidden.a.clone(),
            b: self.hidden.b.clone(),
            c: self.c.clone(),
            solver: self.solver,
            residuals: self.residuals,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let d: NetDocument = serde_json::from_str(text)?;
        if d.a.len() != d.b.len() * d.domain.dim || d.c.len() != d.b.len() {
            return Err(Error::Config("network document has inconsistent lengths".into()));
        }
        Ok(RandomNet {
            hidden: HiddenLayer {
                a: d.a,
                b: d.b,
                seed: d.seed,
                domain: d.domain,
                excluded: d.excluded,
            },
            c: d.c,
            activation: d.activation,
            solver: d.solver,
            residuals: d.residuals,
        })
    }
}

/// Fits output weights of `hidden` on the training split and records both residuals.
pub fn fit_hidden(
    hidden: HiddenLayer,
    data: &Dataset,
    activation: Activation,
    solver: Solver,
    svd_threshold: f64,
) -> Result<RandomNet> {
    let x = data.inputs(Split::Train);
    let y = data.targets(Split::Train);
    let g = design_matrix(&hidden, &x, &activation);
    let fit = fit_output(&g, &y, solver, svd_threshold)?;
    let mut net = RandomNet {
        hidden,
        c: fit.c,
        activation,
        solver,
        residuals: Residuals::default(),
    };
    net.residuals.train = net.relative_error(data, Split::Train).ok();
    if !data.test.is_empty() {
        net.residuals.test = net.relative_error(data, Split::Test).ok();
    }
    Ok(net)
}

/// Step I (sample on `domain`) followed by Step II (least squares).
pub fn train(data: &Dataset, domain: &ParameterDomain, config: &TrainConfig, activation: Activation) -> Result<RandomNet> {
    config.validate()?;
    let hidden = sample_hidden(domain, config.width, config.seed)?;
    fit_hidden(hidden, data, activation, config.solver, config.svd_threshold)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneReport {
    pub removed: usize,
    pub remaining: usize,
    /// `‖before − after‖₂ / ‖before‖₂` on the training inputs.
    pub relative_difference: f64,
}

/// Removes neurons inside the `inner` box and refits the survivors.
pub fn prune_and_refit(
    net: &RandomNet,
    data: &Dataset,
    inner: &ParameterDomain,
    svd_threshold: f64,
) -> Result<(RandomNet, PruneReport)> {
    if *inner == net.hidden.domain {
        return Err(Error::Config("pruning box equals the sampling domain".into()));
    }
    let keep: Vec<usize> = (0..net.width())
        .filter(|&j| !inner.contains_box(net.hidden.weights(j), net.hidden.b[j]))
        .collect();
    if keep.is_empty() {
        return Err(Error::Config("pruning would remove every neuron".into()));
    }
    let removed = net.width() - keep.len();
    let pruned = fit_hidden(net.hidden.select(&keep), data, net.activation, net.solver, svd_threshold)?;
    let x = data.inputs(Split::Train);
    let before = net.predict_many(&x);
    let after = pruned.predict_many(&x);
    let relative_difference = relative_error(&after, &before)?;
    Ok((
        pruned,
        PruneReport {
            removed,
            remaining: keep.len(),
            relative_difference,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GdConfig {
    pub width: usize,
    pub steps: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub activation: Activation,
    /// Standard deviation of the normal initialisation.
    pub init_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GdResult {
    /// Final `(a_j, b_j, c_j)`.
    pub params: Vec<(f64, f64, f64)>,
    pub initial_loss: f64,
    pub final_loss: f64,
}

/// Full-batch gradient descent on the mean squared error over all parameters.
pub fn gd_train(data: &Dataset, config: &GdConfig) -> Result<GdResult> {
    if config.width == 0 {
        return Err(Error::Config("gradient descent width must be at least 1".into()));
    }
    let x = data.inputs(Split::Train);
    let y = data.targets(Split::Train);
    let n = x.len().max(1) as f64;
    let mut rng = seeds::rng(config.seed);
    let mut init = || config.init_scale * rng.sample::<f64, _>(StandardNormal);
    let w = config.width;
    let mut a: Vec<f64> = (0..w).map(|_| init()).collect();
    let mut b: Vec<f64> = (0..w).map(|_| init()).collect();
    let mut c: Vec<f64> = (0..w).map(|_| init()).collect();
    let act = config.activation;
    let mut s = vec![0.0; w * x.len()];
    let mut ds = vec![0.0; w * x.len()];
    let mut resid = vec![0.0; x.len()];
    let loss_at = |a: &[f64], b: &[f64], c: &[f64], s: &mut [f64], ds: &mut [f64], resid: &mut [f64]| -> f64 {
        let mut loss = 0.0;
        for (i, &xi) in x.iter().enumerate() {
            let mut pred = 0.0;
            for j in 0..w {
                let z = a[j] * xi - b[j];
                let (v, d) = (act.eval(z), act.derivative(z));
                s[i * w + j] = v;
                ds[i * w + j] = d;
                pred += c[j] * v;
            }
            resid[i] = pred - y[i];
            loss += resid[i] * resid[i];
        }
        loss / n
    };
    let initial = loss_at(&a, &b, &c, &mut s, &mut ds, &mut resid);
    let mut loss = initial;
    let (mut ga, mut gb, mut gc) = (vec![0.0; w], vec![0.0; w], vec![0.0; w]);
    for _ in 0..config.steps {
        ga.iter_mut().chain(gb.iter_mut()).chain(gc.iter_mut()).for_each(|g| *g = 0.0);
        for (i, &xi) in x.iter().enumerate() {
            let r = 2.0 * resid[i] / n;
            for j in 0..w {
                let v = s[i * w + j];
                let d = ds[i * w + j] * c[j] * r;
                gc[j] += r * v;
                ga[j] += d * xi;
                gb[j] -= d;
            }
        }
        for j in 0..w {
            a[j] -= config.learning_rate * ga[j];
            b[j] -= config.learning_rate * gb[j];
            c[j] -= config.learning_rate * gc[j];
        }
        loss = loss_at(&a, &b, &c, &mut s, &mut ds, &mut resid);
        if !loss.is_finite() || loss > 1e6 * initial.max(f64::MIN_POSITIVE) {
            return Err(Error::Divergence {
                learning_rate: config.learning_rate,
                loss,
                initial,
            });
        }
    }
    Ok(GdResult {
        params: (0..w).map(|j| (a[j], b[j], c[j])).collect(),
        initial_loss: initial,
        final_loss: loss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sample_respects_domain() {
        let d = ParameterDomain::new(1.0, 2.0).unwrap();
        let h = sample_hidden(&d, 3, 7).unwrap();
        assert_eq!(h.width(), 3);
        for j in 0..3 {
            assert!(h.a[j].abs() <= 1.0 && h.b[j].abs() <= 1.0);
        }
        assert_eq!(h, sample_hidden(&d, 3, 7).unwrap());
    }

    #[test]
    fn degenerate_lambda_zero() {
        let h = sample_hidden(&ParameterDomain::new(0.0, 2.0).unwrap(), 5, 1).unwrap();
        assert!(h.a.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ball_sampling_in_two_dimensions() {
        let d = ParameterDomain::with_dim(3.0, 1.0, 2).unwrap();
        let h = sample_hidden(&d, 200, 3).unwrap();
        for j in 0..200 {
            assert!(d.contains(h.weights(j), h.b[j]));
        }
    }

    #[test]
    fn exclusion_errors() {
        let outer = ParameterDomain::new(1.0, 2.0).unwrap();
        assert!(sample_hidden_excluding(&outer, &outer, 10, 0).is_err());
        let nearly = ParameterDomain::new(0.99999, 1.99999).unwrap();
        assert!(matches!(sample_hidden_excluding(&outer, &nearly, 10, 0), Err(Error::Config(_))));
    }

    #[test]
    fn design_entries() {
        let d = ParameterDomain::new(0.0, 0.0).unwrap();
        let h = sample_hidden(&d, 2, 0).unwrap();
        let g = design_matrix(&h, &[0.3, -2.0], &Activation::Sigmoid);
        assert!((0..2).all(|i| (0..2).all(|j| g[(i, j)] == 0.5)));
        let h = HiddenLayer {
            a: vec![1.0],
            b: vec![0.0],
            seed: 0,
            domain: ParameterDomain::new(1.0, 0.0).unwrap(),
            excluded: None,
        };
        assert_eq!(design_matrix(&h, &[-1.0], &Activation::Relu)[(0, 0)], 0.0);
        let x = 3f64.ln() / 2.0;
        assert_relative_eq!(design_matrix(&h, &[x], &Activation::Tanh)[(0, 0)], 0.5, max_relative = 1e-15);
    }

    #[test]
    fn single_column_projection() {
        let g = Mat::from_fn(4, 1, |i, _| 1.0 + i as f64);
        let y = [0.3, -1.0, 2.0, 0.5];
        let fit = fit_output(&g, &y, Solver::MinNormSvd, 1e-12).unwrap();
        let num: f64 = (0..4).map(|i| g[(i, 0)] * y[i]).sum();
        let den: f64 = (0..4).map(|i| g[(i, 0)] * g[(i, 0)]).sum();
        assert_relative_eq!(fit.c[0], num / den, max_relative = 1e-13);
    }

    #[test]
    fn zero_design_flagged() {
        let g = Mat::<f64>::zeros(3, 2);
        let fit = fit_output(&g, &[1.0, 2.0, 3.0], Solver::MinNormSvd, 1e-12).unwrap();
        assert!(fit.report.zero_design);
        assert_eq!(fit.c, vec![0.0, 0.0]);
        assert_relative_eq!(fit.report.residual_norm, 14f64.sqrt());
    }

    #[test]
    fn relative_error_limits() {
        assert_eq!(relative_error(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(relative_error(&[0.0, 0.0], &[1.0, 2.0]).unwrap(), 1.0);
        assert!(relative_error(&[0.0], &[0.0]).is_err());
    }

    #[test]
    fn dataset_split_is_partition() {
        let d = Dataset::equispaced(&TargetFunction::sim1(0.05), 1000, 500, 3).unwrap();
        let mut all: Vec<usize> = d.train.iter().chain(d.test.iter()).copied().collect();
        all.sort();
        assert_eq!(all, (0..1000).collect::<Vec<_>>());
        assert_eq!(d.train.len(), 500);
        assert_eq!(d.x[999], 1.0);
    }

    #[test]
    fn net_json_roundtrip() {
        let data = Dataset::equispaced(&TargetFunction::sim1(0.1), 50, 25, 0).unwrap();
        let net = train(&data, &ParameterDomain::symmetric(5.0).unwrap(), &TrainConfig::new(10, 1), Activation::Sigmoid).unwrap();
        let back = RandomNet::from_json(&net.to_json().unwrap()).unwrap();
        assert_eq!(back, net);
    }

    #[test]
    fn zero_learning_rate_keeps_parameters() {
        let data = Dataset::equispaced(&TargetFunction::windowed_sine(6.0, 0.0, 1.0), 20, 20, 0).unwrap();
        let cfg = GdConfig {
            width: 3,
            steps: 5,
            learning_rate: 0.0,
            seed: 9,
            activation: Activation::Tanh,
            init_scale: 0.5,
        };
        let r0 = gd_train(&data, &GdConfig { steps: 0, ..cfg }).unwrap();
        let r1 = gd_train(&data, &cfg).unwrap();
        assert_eq!(r0.params, r1.params);
    }

    #[test]
    fn divergence_names_learning_rate() {
        let data = Dataset::equispaced(&TargetFunction::gaussian(0.5, 0.2, 1.0), 20, 20, 0).unwrap();
        let cfg = GdConfig {
            width: 4,
            steps: 200,
            learning_rate: 1e4,
            seed: 1,
            activation: Activation::Relu,
            init_scale: 0.5,
        };
        match gd_train(&data, &cfg) {
            Err(Error::Divergence { learning_rate, .. }) => assert_eq!(learning_rate, 1e4),
            other => panic!("expected divergence, got {other:?}"),
        }
    }
}

//! The ridgelet transform `R[f](a, b) = ∫ f(x) ρ̄(a·x − b) dx`, its Fourier form,
//! and the identities that pair it with the integral representation
//! `S[μ](x) = ∫∫ μ(a, b) σ(a·x − b) da db`.

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::activation::{Activation, ActivationProfile};
use crate::error::{Error, Result};
use crate::net::fmt17;
use crate::quad::{self, QuadratureSpec};
use crate::target::{TargetFunction, TargetKind};

const GL_NODES: usize = 16;

/// Precomputed geometry for evaluating `R[f](a, b)` by the defining integral.
#[derive(Debug, Clone)]
pub struct Kernel<'a> {
    f: &'a TargetFunction,
    rho: Activation,
    lo: f64,
    hi: f64,
    breaks: Vec<f64>,
    f_scale: f64,
    rho_half: f64,
    rho_scale: f64,
    f_integral: f64,
}

impl<'a> Kernel<'a> {
    pub fn new(f: &'a TargetFunction, rho: Activation) -> Result<Self> {
        let rho_half = rho.effective_half_width().ok_or_else(|| {
            Error::Precondition(format!("{} does not decay, so R[f] is not defined by a finite integral", rho.descriptor()))
        })?;
        let (lo, hi) = f.effective_support();
        let breaks = match &f.kind {
            TargetKind::Tabulated { x, .. } => x.clone(),
            _ => Vec::new(),
        };
        Ok(Kernel {
            f,
            rho,
            lo,
            hi,
            breaks,
            f_scale: f.length_scale(),
            rho_half,
            rho_scale: rho.length_scale(),
            f_integral: f.integral(),
        })
    }

    pub fn rho(&self) -> Activation {
        self.rho
    }

    /// The `x`-interval on which the integrand can be nonzero.
    fn window(&self, a: f64, b: f64) -> Option<(f64, f64)> {
        let (u, v) = ((b - self.rho_half) / a, (b + self.rho_half) / a);
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        let (x0, x1) = (u.max(self.lo), v.min(self.hi));
        (x0 < x1).then_some((x0, x1))
    }

    fn pieces(&self, x0: f64, x1: f64) -> Vec<f64> {
        let mut out = vec![x0];
        if !self.breaks.is_empty() {
            let i = self.breaks.partition_point(|&t| t <= x0);
            let j = self.breaks.partition_point(|&t| t < x1);
            out.extend_from_slice(&self.breaks[i..j]);
        }
        out.push(x1);
        out
    }

    fn panel_width(&self, a: f64) -> f64 {
        2.0 * self.f_scale.min(self.rho_scale / a.abs())
    }

    /// `R[f](a, b)` by a fixed composite rule sized to both length scales.
    pub fn direct(&self, a: f64, b: f64) -> f64 {
        if a == 0.0 {
            return self.f_integral * self.rho.eval(-b);
        }
        let Some((x0, x1)) = self.window(a, b) else {
            return 0.0;
        };
        let h = self.panel_width(a);
        let mut acc = 0.0;
        for w in self.pieces(x0, x1).windows(2) {
            let panels = ((w[1] - w[0]) / h).ceil().max(1.0) as usize;
            acc += quad::gl_fixed(|x: f64| self.f.value(x) * self.rho.eval(a * x - b), w[0], w[1], panels, GL_NODES);
        }
        acc
    }

    /// `R[f](a, b)` by adaptive quadrature to `spec`.
    pub fn direct_adaptive(&self, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
        if a == 0.0 {
            return Ok(self.f_integral * self.rho.eval(-b));
        }
        let Some((x0, x1)) = self.window(a, b) else {
            return Ok(0.0);
        };
        let h = self.panel_width(a);
        let mut acc = 0.0;
        for w in self.pieces(x0, x1).windows(2) {
            let panels = ((w[1] - w[0]) / h).ceil().max(1.0) as usize;
            let s = spec.with_panels(panels.max(spec.initial_panels));
            acc += quad::integrate(|x: f64| self.f.value(x) * self.rho.eval(a * x - b), w[0], w[1], &s)?.value;
        }
        Ok(acc)
    }

    /// `b`-interval outside which `R[f](a, ·)` vanishes to working precision.
    pub fn b_support(&self, a: f64) -> (f64, f64) {
        let (u, v) = (a * self.lo, a * self.hi);
        (u.min(v) - self.rho_half, u.max(v) + self.rho_half)
    }
}

/// `R[f](a, b)` from the defining integral.
pub fn ridgelet_direct(f: &TargetFunction, rho: &Activation, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    let k = Kernel::new(f, *rho)?;
    Ok(Complex64::new(k.direct_adaptive(a, b, spec)?, 0.0))
}

fn fourier_plan(f: &TargetFunction, rho: &Activation, a: f64, b: f64) -> Result<(f64, usize)> {
    let cutoff = rho
        .spectral_cutoff()
        .ok_or_else(|| Error::Precondition(format!("{} has no integrable Fourier transform", rho.descriptor())))?;
    let mut omega = cutoff;
    if let (Some(xi), true) = (f.bandwidth(), a != 0.0) {
        omega = omega.min(xi / a.abs());
    }
    let (lo, hi) = f.effective_support();
    let reach = lo.abs().max(hi.abs());
    let freq = b.abs() + a.abs() * reach + rho.effective_half_width().unwrap_or(10.0);
    let panels = (omega * freq / PI).ceil() as usize + 4;
    Ok((omega, panels))
}

/// `(1/2π) ∫ f̂(ωa) ρ̂̄(ω) e^{iωb} dω`.
pub fn ridgelet_fourier(f: &TargetFunction, rho: &Activation, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    let (omega, panels) = fourier_plan(f, rho, a, b)?;
    let g = |w: f64| {
        let r = rho.fourier(w).expect("checked by fourier_plan");
        f.fourier_fast(w * a) * r.conj() * Complex64::from_polar(1.0, w * b)
    };
    let spec = spec.with_panels(panels.max(spec.initial_panels));
    let e = quad::integrate(g, -omega, omega, &spec)?;
    Ok(e.value / (2.0 * PI))
}

/// Fixed-rule variant of [`ridgelet_fourier`] for grids and sampling studies.
pub fn ridgelet_fourier_fast(f: &TargetFunction, rho: &Activation, a: f64, b: f64) -> Result<Complex64> {
    let (omega, panels) = fourier_plan(f, rho, a, b)?;
    let g = |w: f64| {
        let r = rho.fourier(w).expect("checked by fourier_plan");
        f.fourier_fast(w * a) * r.conj() * Complex64::from_polar(1.0, w * b)
    };
    let v: Complex64 = quad::gl_fixed(g, -omega, omega, panels, GL_NODES);
    Ok(v / (2.0 * PI))
}

/// `(2π)^{m−1} ∫ σ̂(ω) ρ̂̄(ω) |ω|^{−m} dω`.
pub fn admissibility_constant(sigma: &Activation, rho: &Activation, m: usize, spec: &QuadratureSpec) -> Result<f64> {
    let no_ft = |a: &Activation| Error::Precondition(format!("{} has no integrable Fourier transform", a.descriptor()));
    if !sigma.has_fourier() {
        return Err(no_ft(sigma));
    }
    if !rho.has_fourier() {
        return Err(no_ft(rho));
    }
    if let Activation::GaussianDerivative { scale, .. } = rho {
        if *scale == 0.0 {
            return Ok(0.0);
        }
    }
    let mf = m as f64;
    let g = |w: f64| -> Complex64 {
        let s = sigma.fourier(w).unwrap();
        let r = rho.fourier(w).unwrap();
        s * r.conj() * w.abs().powf(-mf)
    };
    // |g(ω)|·|ω| must vanish at the origin for the integral to converge
    for sign in [1.0, -1.0] {
        let (w1, w2) = (1e-3 * sign, 1e-6 * sign);
        let (v1, v2) = (g(w1).norm() * w1.abs(), g(w2).norm() * w2.abs());
        if v1 > 0.0 && v2 > 0.25 * v1 {
            return Err(Error::NotAdmissible(format!(
                "σ̂ρ̄̂|ω|^-{m} is not integrable at ω = 0 for σ = {}, ρ = {}",
                sigma.descriptor(),
                rho.descriptor()
            )));
        }
    }
    let omega = sigma.spectral_cutoff().unwrap().min(rho.spectral_cutoff().unwrap());
    let spec = spec.with_panels(spec.initial_panels.max(8));
    let left = quad::integrate(g, -omega, 0.0, &spec)?;
    let right = quad::integrate(g, 0.0, omega, &spec)?;
    let v = (left.value + right.value) * (2.0 * PI).powi(m as i32 - 1);
    Ok(v.re)
}

/// Closed-form normalisation `C` of `C·ρ₀^{(n)}` that is admissible with itself.
pub fn self_admissible_scale(order: u32, width: f64, m: usize) -> Result<f64> {
    let q = 2.0 * order as f64 - m as f64;
    if q <= 0.0 {
        return Err(Error::Precondition(format!(
            "self-admissibility needs 2n - m > 0, got n = {order}, m = {m}"
        )));
    }
    let k = (2.0 * PI).powi(m as i32 - 1) * 2.0 * PI * width * width * libm::tgamma((q + 1.0) / 2.0) / width.powf(q + 1.0);
    Ok(1.0 / k.sqrt())
}

/// `ρ = C·d^n/dz^n exp(−z²/2τ²)` with `C` chosen so that `ρ` is admissible with itself.
pub fn make_self_admissible(order: u32, width: f64, m: usize) -> Result<ActivationProfile> {
    let scale = self_admissible_scale(order, width, m)?;
    let rho = Activation::GaussianDerivative { order, width, scale };
    let k = admissibility_constant(&rho, &rho, m, &QuadratureSpec::with_tol(1e-12))?;
    if (k - 1.0).abs() > 1e-8 {
        return Err(Error::ToleranceNotMet {
            quantity: "self-admissibility constant".into(),
            achieved: k,
            estimate: (k - 1.0).abs(),
            tolerance: 1e-8,
        });
    }
    Ok(ActivationProfile::self_paired(rho))
}

/// Rescales the base Gaussian derivative `rho` so that it is admissible with `sigma`.
pub fn normalize_against(sigma: &Activation, rho: &Activation, m: usize) -> Result<Activation> {
    let k = admissibility_constant(sigma, rho, m, &QuadratureSpec::with_tol(1e-12))?;
    if k.abs() < 1e-300 {
        return Err(Error::NotAdmissible(format!(
            "admissibility constant of σ = {}, ρ = {} vanishes",
            sigma.descriptor(),
            rho.descriptor()
        )));
    }
    rho.scaled(1.0 / k)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissiblePair {
    pub sigma: Activation,
    pub rho: Activation,
    pub m: usize,
    pub k_adm: f64,
    pub self_admissible: bool,
}

impl AdmissiblePair {
    pub fn new(sigma: Activation, rho: Activation, m: usize) -> Result<Self> {
        let k_adm = admissibility_constant(&sigma, &rho, m, &QuadratureSpec::with_tol(1e-12))?;
        Ok(AdmissiblePair {
            sigma,
            rho,
            m,
            k_adm,
            self_admissible: sigma == rho && (k_adm - 1.0).abs() <= 1e-8,
        })
    }

    /// Normalised `GaussianDerivative(n, τ)` paired with itself.
    pub fn self_paired(order: u32, width: f64) -> Result<Self> {
        let p = make_self_admissible(order, width, 1)?;
        Self::new(p.sigma, p.rho, 1)
    }

    /// `σ` with the base derivative `rho` rescaled to unit admissibility constant.
    pub fn normalized(sigma: Activation, rho: Activation) -> Result<Self> {
        let rho = normalize_against(&sigma, &rho, 1)?;
        Self::new(sigma, rho, 1)
    }

    pub fn profile(&self) -> ActivationProfile {
        ActivationProfile::new(self.sigma, self.rho)
    }
}

/// `∫_{|ξ|>t} |f̂(ξ)|^p dξ` for the Gaussian kinds, `p ∈ {1, 2}`.
fn spectral_tail(f: &TargetFunction, t: f64, p: i32) -> Result<f64> {
    let bumps = match &f.kind {
        TargetKind::GaussianBump(g) => vec![*g],
        TargetKind::GaussianMix { bumps } => bumps.clone(),
        _ => {
            return Err(Error::Precondition(format!(
                "spectral tails are only available for Gaussian targets, got {}",
                f.descriptor()
            )))
        }
    };
    if p == 1 {
        // upper bound through the triangle inequality
        return Ok(bumps
            .iter()
            .map(|g| g.amplitude.abs() * 2.0 * PI * libm::erfc(g.scale * t / 2f64.sqrt()))
            .sum());
    }
    let xi = f.bandwidth().unwrap();
    if t >= xi {
        return Ok(0.0);
    }
    let spread = bumps.iter().map(|g| g.center).fold(f64::NEG_INFINITY, f64::max)
        - bumps.iter().map(|g| g.center).fold(f64::INFINITY, f64::min);
    let panels = ((xi - t) * spread.max(1e-3) / PI).ceil() as usize + 2;
    let spec = QuadratureSpec::with_tol(1e-11).with_panels(panels.min(4096));
    let w = |x: f64| f.fourier_fast(x).norm_sqr();
    let right = quad::integrate(w, t, xi, &spec)?.value;
    let left = quad::integrate(w, -xi, -t, &spec)?.value;
    Ok(right + left)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionOptions {
    /// Admissible tail of the neglected `|a| > A` region, relative to `sup|f|`.
    pub tail_tol: f64,
    /// Largest box the auto-sizer may choose.
    pub max_a: f64,
    /// Fixed box half-width; `None` asks the auto-sizer.
    pub a_box: Option<f64>,
}

impl Default for ReconstructionOptions {
    fn default() -> Self {
        ReconstructionOptions {
            tail_tol: 2e-4,
            max_a: 5000.0,
            a_box: None,
        }
    }
}

/// Bound on `|∫_{|a|>A} ∫ R[f](a,b) σ(ax − b) db da|`, uniform in `x`.
pub fn reconstruction_tail(f: &TargetFunction, pair: &AdmissiblePair, a_box: f64) -> Result<f64> {
    let (sigma, rho) = (pair.sigma, pair.rho);
    let omega = sigma
        .spectral_cutoff()
        .zip(rho.spectral_cutoff())
        .map(|(x, y)| x.min(y))
        .ok_or_else(|| Error::Precondition("reconstruction needs σ and ρ with Fourier transforms".into()))?;
    let g = |w: f64| -> f64 {
        if w == 0.0 {
            return 0.0;
        }
        let s = sigma.fourier(w).unwrap().norm() * rho.fourier(w).unwrap().norm() / w.abs();
        s * spectral_tail(f, a_box * w.abs(), 1).unwrap_or(f64::INFINITY)
    };
    let spec = QuadratureSpec::with_tol(1e-8).with_panels(8);
    let v = quad::integrate(g, 0.0, omega, &spec)?.value * 2.0;
    Ok(v / (2.0 * PI))
}

fn choose_box(f: &TargetFunction, pair: &AdmissiblePair, opts: &ReconstructionOptions) -> Result<f64> {
    let tol = opts.tail_tol * f.sup_norm();
    if let Some(a) = opts.a_box {
        let tail = reconstruction_tail(f, pair, a)?;
        if tail > tol {
            let suggested = choose_box(f, pair, &ReconstructionOptions { a_box: None, max_a: f64::INFINITY, ..*opts })?;
            return Err(Error::EnlargeBox {
                tail,
                tolerance: tol,
                suggested_a: suggested,
            });
        }
        return Ok(a);
    }
    let mut hi = 1.0 / f.length_scale();
    while reconstruction_tail(f, pair, hi)? > tol {
        hi *= 2.0;
        if hi > opts.max_a.min(1e7) {
            return Err(Error::EnlargeBox {
                tail: reconstruction_tail(f, pair, opts.max_a.min(1e7))?,
                tolerance: tol,
                suggested_a: hi,
            });
        }
    }
    let mut lo = hi / 2.0;
    for _ in 0..12 {
        let mid = 0.5 * (lo + hi);
        if reconstruction_tail(f, pair, mid)? > tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Gauss–Legendre nodes on `[0, A]`, uniform near the origin and geometric beyond.
fn graded_nodes(a_box: f64, near: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let near = near.min(a_box);
    let n_near = (near / 0.25).ceil().max(1.0) as usize;
    out.extend(quad::gl_rule(0.0, near, n_near, 12));
    let mut lo = near;
    while lo < a_box {
        let hi = (lo * 1.1).min(a_box);
        out.extend(quad::gl_rule(lo, hi, 1, 12));
        lo = hi;
    }
    out
}

/// `S[R[f]](x)` at each point of `xs`.
pub fn reconstruct_many(
    f: &TargetFunction,
    pair: &AdmissiblePair,
    xs: &[f64],
    opts: &ReconstructionOptions,
) -> Result<Vec<f64>> {
    if (pair.k_adm - 1.0).abs() > 1e-6 {
        return Err(Error::Precondition(format!(
            "reconstruction needs an admissibility constant of 1, got {}",
            pair.k_adm
        )));
    }
    if f.is_zero() {
        return Ok(vec![0.0; xs.len()]);
    }
    let sigma_half = pair
        .sigma
        .effective_half_width()
        .ok_or_else(|| Error::Precondition("reconstruction needs a decaying σ".into()))?;
    let a_box = choose_box(f, pair, opts)?;
    let kernel = Kernel::new(f, pair.rho)?;
    let hb = 2.0 * pair.rho.length_scale().min(pair.sigma.length_scale());
    let near = 4.0 * (1.0 + 1.0 / (f.effective_support().1 - f.effective_support().0));
    let half = graded_nodes(a_box, near);
    let a_nodes: Vec<(f64, f64)> = half.iter().map(|&(a, w)| (-a, w)).chain(half.iter().copied()).collect();
    let contributions: Vec<Vec<f64>> = a_nodes
        .par_iter()
        .map(|&(a, wa)| {
            let (b0, b1) = kernel.b_support(a);
            let panels = ((b1 - b0) / hb).ceil().max(1.0) as usize;
            let nodes = quad::gl_rule(b0, b1, panels, 8);
            let r: Vec<f64> = nodes.iter().map(|&(b, _)| kernel.direct(a, b)).collect();
            xs.iter()
                .map(|&x| {
                    let c = a * x;
                    let i0 = nodes.partition_point(|&(b, _)| b < c - sigma_half);
                    let i1 = nodes.partition_point(|&(b, _)| b <= c + sigma_half);
                    let mut s = 0.0;
                    for k in i0..i1 {
                        let (b, wb) = nodes[k];
                        s += wb * r[k] * pair.sigma.eval(c - b);
                    }
                    wa * s
                })
                .collect()
        })
        .collect();
    let mut out = vec![0.0; xs.len()];
    for c in &contributions {
        for (o, v) in out.iter_mut().zip(c) {
            *o += v;
        }
    }
    Ok(out)
}

pub fn reconstruct(f: &TargetFunction, pair: &AdmissiblePair, x: f64, opts: &ReconstructionOptions) -> Result<f64> {
    Ok(reconstruct_many(f, pair, &[x], opts)?[0])
}

/// `∫ |R[f](a, b)|² db` over `b ∈ [b_lo, b_hi]`.
fn b_energy(kernel: &Kernel<'_>, a: f64, b_lo: f64, b_hi: f64) -> f64 {
    let (s0, s1) = kernel.b_support(a);
    let (lo, hi) = (s0.max(b_lo), s1.min(b_hi));
    if lo >= hi {
        return 0.0;
    }
    let h = 2.0 * kernel.rho_scale;
    let panels = ((hi - lo) / h).ceil().max(1.0) as usize;
    quad::gl_fixed(|b: f64| kernel.direct(a, b).powi(2), lo, hi, panels, GL_NODES)
}

/// `∫_{|a|≤λ} ∫_{|b|≤κ/2} |R[f](a,b)|² db da`.
pub fn box_energy(f: &TargetFunction, rho: &Activation, lambda: f64, kappa: f64, spec: &QuadratureSpec) -> Result<f64> {
    if lambda <= 0.0 || kappa <= 0.0 || f.is_zero() {
        return Ok(0.0);
    }
    let kernel = Kernel::new(f, *rho)?;
    let g = |a: f64| b_energy(&kernel, a, -0.5 * kappa, 0.5 * kappa);
    let mut total = 0.0;
    for (lo, hi) in energy_panels(lambda) {
        let s = spec.with_panels(spec.initial_panels.max(2));
        total += quad::integrate(g, lo, hi, &s)?.value + quad::integrate(g, -hi, -lo, &s)?.value;
    }
    Ok(total)
}

/// Fixed panel edges in `|a|` so that energies over nested boxes reuse the same pieces.
fn energy_panels(lambda: f64) -> Vec<(f64, f64)> {
    let mut edges = vec![0.0];
    let mut e: f64 = 0.5;
    while e < lambda {
        edges.push(e);
        e = if e < 4.0 { e + 0.5 } else { e * 1.25 };
    }
    edges.push(lambda);
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

/// `(1/2π) ∫ |ρ̂(ω)|² |ω|^{-1} ∫_{|ξ|>A|ω|} |f̂(ξ)|² dξ dω`, the energy of `R[f]` outside `|a| ≤ A`.
pub fn energy_outside(f: &TargetFunction, rho: &Activation, a_box: f64) -> Result<f64> {
    let omega = rho
        .spectral_cutoff()
        .ok_or_else(|| Error::Precondition(format!("{} has no integrable Fourier transform", rho.descriptor())))?;
    let mut err = None;
    let g = |w: f64| -> f64 {
        if w == 0.0 {
            return 0.0;
        }
        let r = rho.fourier(w).unwrap().norm_sqr() / w.abs();
        match spectral_tail(f, a_box * w.abs(), 2) {
            Ok(t) => r * t,
            Err(_) => f64::NAN,
        }
    };
    let spec = QuadratureSpec::with_tol(1e-10).with_panels(16);
    let right = quad::integrate(g, 0.0, omega, &spec);
    let left = quad::integrate(g, -omega, 0.0, &spec);
    let v = match (right, left) {
        (Ok(r), Ok(l)) => r.value + l.value,
        (Err(e), _) | (_, Err(e)) => {
            err = Some(e);
            0.0
        }
    };
    if let Some(e) = err {
        return Err(e);
    }
    Ok(v / (2.0 * PI))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlancherelReport {
    pub box_a: f64,
    pub inside: f64,
    pub outside: f64,
    pub transform_norm: f64,
    pub target_norm: f64,
    pub gap: f64,
}

/// `|‖R[f]‖ − ‖f‖₂| / ‖f‖₂` with `‖R[f]‖²` split into a quadrature box and its exact outside energy.
pub fn plancherel(f: &TargetFunction, rho: &Activation, spec: &QuadratureSpec) -> Result<PlancherelReport> {
    let k = admissibility_constant(rho, rho, 1, &QuadratureSpec::with_tol(1e-12))?;
    if (k - 1.0).abs() > 1e-6 {
        return Err(Error::Precondition(format!("Plancherel needs a self-admissible ρ, constant is {k}")));
    }
    let target_norm = f.l2_norm()?.value;
    if !(target_norm > 0.0) {
        return Err(Error::UndefinedMetric("Plancherel gap of the zero function".into()));
    }
    let box_a = 2.0 / f.length_scale();
    let kernel = Kernel::new(f, *rho)?;
    let g = |a: f64| b_energy(&kernel, a, f64::NEG_INFINITY, f64::INFINITY);
    let s = spec.with_panels(spec.initial_panels.max(16));
    let inside = quad::integrate(g, 0.0, box_a, &s)?.value + quad::integrate(g, -box_a, 0.0, &s)?.value;
    let outside = energy_outside(f, rho, box_a)?;
    let transform_norm = (inside + outside).sqrt();
    Ok(PlancherelReport {
        box_a,
        inside,
        outside,
        transform_norm,
        target_norm,
        gap: (transform_norm - target_norm).abs() / target_norm,
    })
}

pub fn plancherel_gap(f: &TargetFunction, rho: &Activation, spec: &QuadratureSpec) -> Result<f64> {
    Ok(plancherel(f, rho, spec)?.gap)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub target: TargetKind,
    pub target_descriptor: String,
    pub rho: Activation,
    pub a_range: (f64, f64),
    pub b_range: (f64, f64),
    pub resolution: (usize, usize),
    pub method: String,
    pub rel_tol: f64,
    pub failed_cells: usize,
    pub window: String,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumGrid {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Row-major in `a`: entry `i * b.len() + j` holds `R[f](a_i, b_j)`.
    pub values: Vec<Complex64>,
    pub meta: GridMeta,
}

fn axis(range: (f64, f64), n: usize) -> Vec<f64> {
    (0..n).map(|i| range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64).collect()
}

/// `R[f]` on a tensor grid through the Fourier form.
pub fn spectrum_grid(
    f: &TargetFunction,
    rho: &Activation,
    a_range: (f64, f64),
    b_range: (f64, f64),
    resolution: (usize, usize),
    spec: &QuadratureSpec,
) -> Result<SpectrumGrid> {
    if resolution.0 < 2 || resolution.1 < 2 {
        return Err(Error::Config(format!("spectrum grid needs at least 2 nodes per axis, got {resolution:?}")));
    }
    rho.spectral_cutoff()
        .ok_or_else(|| Error::Precondition(format!("{} has no integrable Fourier transform", rho.descriptor())))?;
    let start = Instant::now();
    let (a, b) = (axis(a_range, resolution.0), axis(b_range, resolution.1));
    let rows: Vec<Vec<Option<Complex64>>> = a
        .par_iter()
        .map(|&ai| b.iter().map(|&bj| ridgelet_fourier(f, rho, ai, bj, spec).ok()).collect())
        .collect();
    let mut failed = 0;
    let values: Vec<Complex64> = rows
        .into_iter()
        .flatten()
        .map(|v| {
            v.unwrap_or_else(|| {
                failed += 1;
                Complex64::new(f64::NAN, f64::NAN)
            })
        })
        .collect();
    let window = match f.kind {
        TargetKind::WindowedSine { lo, hi, .. } => format!("hard window on [{lo}, {hi}]"),
        _ => "none".into(),
    };
    Ok(SpectrumGrid {
        a,
        b,
        values,
        meta: GridMeta {
            target: f.kind.clone(),
            target_descriptor: f.descriptor(),
            rho: *rho,
            a_range,
            b_range,
            resolution,
            method: "fourier".into(),
            rel_tol: spec.rel_tol,
            failed_cells: failed,
            window,
            wall_time_s: start.elapsed().as_secs_f64(),
        },
    })
}

impl SpectrumGrid {
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.b.len() + j]
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// `Σ |R|² Δa Δb` over the grid.
    pub fn riemann_energy(&self) -> f64 {
        let da = (self.meta.a_range.1 - self.meta.a_range.0) / (self.a.len() - 1) as f64;
        let db = (self.meta.b_range.1 - self.meta.b_range.0) / (self.b.len() - 1) as f64;
        self.values.iter().filter(|v| v.re.is_finite()).map(|v| v.norm_sqr()).sum::<f64>() * da * db
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
        w.write_record(["a", "b", "re", "im", "magnitude"])?;
        for (i, &a) in self.a.iter().enumerate() {
            for (j, &b) in self.b.iter().enumerate() {
                let v = self.get(i, j);
                w.write_record([fmt17(a), fmt17(b), fmt17(v.re), fmt17(v.im), fmt17(v.norm())])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_metadata(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(&self.meta)?)?;
        Ok(())
    }
}

/// `c Σ_{u=±1} ∫ (−f''(tu)) (ux − t)₊ dt` with `c = −1/2`, the polar reconstruction for ReLU.
pub fn homogeneous_reconstruct(f: &TargetFunction, k: u32, m: usize, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    if (m, k) != (1, 1) {
        return Err(Error::NotImplemented(format!(
            "polar reconstruction is available for m = 1, k = 1 only, got m = {m}, k = {k}"
        )));
    }
    if f.is_zero() {
        return Ok(0.0);
    }
    if f.second_derivative(0.0).is_none() {
        return Err(Error::Precondition(format!(
            "polar reconstruction needs a twice differentiable, decaying target, got {}",
            f.descriptor()
        )));
    }
    let c = -0.5;
    let (lo, hi) = f.effective_support();
    let panels = ((hi - lo) / f.length_scale()).ceil() as usize + 1;
    let mut total = 0.0;
    for u in [1.0, -1.0] {
        // t ranges over the support of f(t u), and (ux − t)₊ cuts at t = ux
        let (t0, t1) = if u > 0.0 { (lo, hi) } else { (-hi, -lo) };
        let cut = (u * x).min(t1);
        if cut <= t0 {
            continue;
        }
        let g = |t: f64| -f.second_derivative(t * u).unwrap() * (u * x - t).max(0.0);
        let s = spec.with_panels(panels.max(spec.initial_panels));
        total += quad::integrate(g, t0, cut, &s)?.value;
    }
    Ok(c * total)
}

//! Decay constants of the ridgelet spectrum and the approximation lower bounds built from them.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::activation::{unit_ball_volume, Activation};
use crate::error::{Error, Result};
use crate::net::{fit_hidden, sample_hidden, Dataset, ParameterDomain, RandomNet, Solver, Split};
use crate::quad::{self, QuadratureSpec};
use crate::ridgelet::{admissibility_constant, box_energy};
use crate::seeds;
use crate::target::{Side, TargetFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BoundMode {
    /// The formulas exactly as displayed.
    AsPrinted,
    /// Crossover and bracket re-derived from the envelope integral, with the
    /// Cauchy–Schwarz factor 2 restored in the decay branch.
    #[default]
    Corrected,
}

impl BoundMode {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "as_printed" | "asprinted" | "printed" => Ok(BoundMode::AsPrinted),
            "corrected" => Ok(BoundMode::Corrected),
            other => Err(Error::Config(format!("unknown bound mode '{other}', expected as_printed or corrected"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BoundMode::AsPrinted => "as_printed",
            BoundMode::Corrected => "corrected",
        }
    }

    /// Multiplier on `C_{ρ,s} C_{f,s}(u)` in the decay branch.
    pub fn decay_factor(&self) -> f64 {
        match self {
            BoundMode::AsPrinted => 1.0,
            BoundMode::Corrected => 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub c0: f64,
    pub c_rho_s: f64,
    /// `C_{f,s}(u)` at `u = +1`.
    pub c_f_s_plus: f64,
    /// `C_{f,s}(u)` at `u = −1`.
    pub c_f_s_minus: f64,
    pub sobolev_norm: f64,
    pub c_inf: f64,
    pub theta_as_printed: f64,
    pub theta_corrected: f64,
    pub s: f64,
    pub m: usize,
    pub v_m: f64,
    pub omega_m1: f64,
    /// `‖f‖₂²`.
    pub l2_sq: f64,
}

impl BoundConstants {
    pub fn c_f_s(&self, u: f64) -> f64 {
        if u >= 0.0 {
            self.c_f_s_plus
        } else {
            self.c_f_s_minus
        }
    }

    /// `C∞` as used by `mode`.
    pub fn c_inf_for(&self, mode: BoundMode) -> f64 {
        mode.decay_factor() * self.c_inf
    }
}

/// `(1/(2(2π)²)) ∫ |ρ̂(ω)|² |ω|^{−(2s+m−1)} dω`, square-rooted.
pub fn rho_decay_constant(rho: &Activation, s: f64, m: usize) -> Result<f64> {
    let cutoff = rho
        .spectral_cutoff()
        .ok_or_else(|| Error::Precondition(format!("{} has no integrable Fourier transform", rho.descriptor())))?;
    let p = 2.0 * s + m as f64 - 1.0;
    let g = |w: f64| {
        if w == 0.0 {
            return 0.0;
        }
        rho.fourier(w).unwrap().norm_sqr() * w.abs().powf(-p)
    };
    // |ρ̂|² must vanish faster than |ω|^{p−1} at the origin
    let needed = (p - 1.0) / 2.0;
    let (w1, w2) = (1e-3, 1e-6);
    let (v1, v2) = (g(w1) * w1, g(w2) * w2);
    if v1 > 0.0 && v2 > 0.25 * v1 || (v1 == 0.0 && v2 > 0.0) {
        return Err(Error::Precondition(format!(
            "C_rho_s diverges for {} at s = {s}: ρ̂ must vanish at ω = 0 faster than |ω|^{needed}",
            rho.descriptor()
        )));
    }
    let spec = QuadratureSpec::with_tol(1e-11).with_panels(8);
    let v = 2.0 * quad::integrate(g, 0.0, cutoff, &spec)?.value;
    Ok((v / (2.0 * (2.0 * PI).powi(2))).sqrt())
}

/// `(mV_mC₀²/C∞²)^{1/(2s+m)}` or its reciprocal, depending on `mode`.
pub fn theta_from(c0: f64, c_inf: f64, s: f64, m: usize, mode: BoundMode) -> Result<f64> {
    if !(c0 > 0.0 && c_inf > 0.0) {
        return Err(Error::UndefinedMetric(format!(
            "crossover radius needs positive constants, got C0 = {c0}, C_inf = {c_inf}"
        )));
    }
    let q = m as f64 * unit_ball_volume(m) * c0 * c0 / (c_inf * c_inf);
    let e = 1.0 / (2.0 * s + m as f64);
    Ok(match mode {
        BoundMode::AsPrinted => q.powf(e),
        BoundMode::Corrected => q.powf(-e),
    })
}

pub fn compute_constants(f: &TargetFunction, rho: &Activation, s: f64, m: usize, spec: &QuadratureSpec) -> Result<BoundConstants> {
    spec.validate()?;
    if m != f.dimension() {
        return Err(Error::Precondition(format!(
            "targets are functions on R^{}, constants requested for m = {m}",
            f.dimension()
        )));
    }
    let v_m = unit_ball_volume(m);
    let l1 = f.l1_norm()?.value;
    let c0 = l1 * rho.sup_norm();
    let c_rho_s = rho_decay_constant(rho, s, m)?;
    let plus = f.spectral_energy(s, Side::Positive)?.value.max(0.0);
    let minus = f.spectral_energy(s, Side::Negative)?.value.max(0.0);
    let sobolev_norm = (plus + minus).sqrt();
    let c_inf = sobolev_norm * c_rho_s;
    let theta = |mode: BoundMode| theta_from(c0, mode.decay_factor() * c_inf, s, m, mode).unwrap_or(f64::NAN);
    Ok(BoundConstants {
        c0,
        c_rho_s,
        c_f_s_plus: plus.sqrt(),
        c_f_s_minus: minus.sqrt(),
        sobolev_norm,
        c_inf,
        theta_as_printed: theta(BoundMode::AsPrinted),
        theta_corrected: theta(BoundMode::Corrected),
        s,
        m,
        v_m,
        omega_m1: m as f64 * v_m,
        l2_sq: f.l2_norm()?.value.powi(2),
    })
}

/// `min{C₀, k C_{ρ,s} C_{f,s}(u) r^{−s−m/2}}` with `k` set by `mode`.
pub fn decay_envelope(c: &BoundConstants, r: f64, u: f64, mode: BoundMode) -> f64 {
    let decay = mode.decay_factor() * c.c_rho_s * c.c_f_s(u) * r.powf(-c.s - c.m as f64 / 2.0);
    c.c0.min(decay)
}

pub fn theta(c: &BoundConstants, mode: BoundMode) -> Result<f64> {
    theta_from(c.c0, c.c_inf_for(mode), c.s, c.m, mode)
}

/// The closed-form lower bound on `‖f − g‖₂²` for networks with parameters in `|a| ≤ λ`, `|b| ≤ κ/2`.
pub fn lower_bound_closed_form(c: &BoundConstants, lambda: f64, kappa: f64, mode: BoundMode) -> Result<f64> {
    if !(lambda >= 0.0 && kappa >= 0.0) {
        return Err(Error::Domain {
            quantity: "lambda or kappa".into(),
            value: lambda.min(kappa),
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let mf = c.m as f64;
    let flat = c.l2_sq - c.c0 * c.c0 * c.v_m * kappa * lambda.powf(mf);
    if c.c0 == 0.0 || c.c_inf == 0.0 {
        return Ok(flat);
    }
    let th = theta(c, mode)?;
    if lambda <= th {
        return Ok(flat);
    }
    if c.s <= 0.0 {
        return Err(Error::Precondition("the decay branch needs s > 0".into()));
    }
    let ci = c.c_inf_for(mode);
    let s2 = 2.0 * c.s;
    let bracket = match mode {
        BoundMode::AsPrinted => lambda.powf(-s2) + ((s2 - mf) / mf) * th.powf(-s2),
        BoundMode::Corrected => ((s2 + mf) / mf) * th.powf(-s2) - lambda.powf(-s2),
    };
    Ok(c.l2_sq - ci * ci * kappa / s2 * bracket)
}

/// `‖f‖₂² − ∫_V |R[f]|²`, clipped at zero, for a self-admissible `ρ`.
pub fn tail_bound_quadrature(f: &TargetFunction, rho: &Activation, lambda: f64, kappa: f64, spec: &QuadratureSpec) -> Result<f64> {
    let k = admissibility_constant(rho, rho, 1, &QuadratureSpec::with_tol(1e-12))?;
    if (k - 1.0).abs() > 1e-6 {
        return Err(Error::Precondition(format!(
            "the spectral tail bound needs a self-admissible ρ, constant is {k}"
        )));
    }
    let l2_sq = f.l2_norm()?.value.powi(2);
    let inside = box_energy(f, rho, lambda, kappa, spec)?;
    Ok((l2_sq - inside).max(0.0))
}

/// `‖f − g‖²` over the whole line, integrating over the support of every unit.
pub fn l2_error_sq(f: &TargetFunction, net: &RandomNet) -> Result<f64> {
    let half = net
        .activation
        .effective_half_width()
        .ok_or_else(|| Error::Precondition("L2 error over R needs a decaying activation".into()))?;
    let (flo, fhi) = f.effective_support();
    let mut breaks = vec![flo, fhi];
    let mut live = Vec::new();
    for j in 0..net.width() {
        let a = net.hidden.a[j];
        if a == 0.0 || net.c[j] == 0.0 {
            continue;
        }
        live.push(j);
        let b = net.hidden.b[j];
        breaks.push((b - half) / a);
        breaks.push((b + half) / a);
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let act = net.activation;
    let g = |x: f64| {
        let mut v = f.value(x);
        for &j in &live {
            let z = net.hidden.a[j] * x - net.hidden.b[j];
            if z.abs() <= half {
                v -= net.c[j] * act.eval(z);
            }
        }
        v * v
    };
    let scale = f.l2_norm()?.value.powi(2).max(f64::MIN_POSITIVE);
    let spec = QuadratureSpec {
        abs_tol: 1e-5 * scale,
        ..QuadratureSpec::with_tol(1e-4)
    };
    Ok(quad::integrate_pieces(g, &breaks, &spec)?.value)
}

/// `∫ (f − g)²` over the effective support of `f`, by a fixed rule finer than every unit.
pub fn window_error_sq(f: &TargetFunction, net: &RandomNet) -> Result<f64> {
    let (lo, hi) = f.effective_support();
    let a_max = net.hidden.a.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let h = 0.5 * f.length_scale().min(net.activation.length_scale() / a_max.max(1e-300));
    let panels = ((hi - lo) / h).ceil().clamp(64.0, 1e6) as usize;
    Ok(quad::gl_fixed(|x: f64| (f.value(x) - net.predict(x)).powi(2), lo, hi, panels, 16))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundTraining {
    pub width: usize,
    pub trials: usize,
    /// Training points spread over the effective support of `f`.
    pub n_points: usize,
    pub seed: u64,
    pub svd_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub lambda: f64,
    pub kappa: f64,
    pub s: f64,
    pub mode: BoundMode,
    pub closed_form: f64,
    pub quadrature_tail: f64,
    /// Mean of `‖f − g‖₂²` over trials.
    pub empirical_error: f64,
    pub min_empirical_error: f64,
    /// Mean of `∫ (f − g)²` over the effective support of `f` only.
    pub window_error: f64,
    pub mean_relative_training_error: f64,
    pub trials: usize,
    pub vacuous: bool,
    /// Some trial reached below the spectral tail by more than the tolerance.
    pub violation: bool,
}

/// Tolerance of the empirical-vs-tail comparison, relative to `‖f‖₂²`.
pub const EMPIRICAL_TOLERANCE: f64 = 1e-3;

/// Trains self-activated networks on each box and compares their error with both bounds.
pub fn bound_vs_training(
    f: &TargetFunction,
    rho: &Activation,
    boxes: &[(f64, f64)],
    training: &BoundTraining,
    s: f64,
    mode: BoundMode,
) -> Result<Vec<BoundRow>> {
    let spec = QuadratureSpec::with_tol(1e-9);
    let constants = compute_constants(f, rho, s, 1, &spec)?;
    let (lo, hi) = f.effective_support();
    let n = training.n_points.max(2);
    let x: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let y: Vec<f64> = x.iter().map(|&v| f.value(v)).collect();
    let data = Dataset::from_samples(x, y, n, training.seed)?;
    boxes
        .par_iter()
        .enumerate()
        .map(|(row, &(lambda, kappa))| {
            let closed_form = lower_bound_closed_form(&constants, lambda, kappa, mode)?;
            let quadrature_tail = tail_bound_quadrature(f, rho, lambda, kappa, &spec)?;
            let (mut errors, mut window, mut rel) = (Vec::new(), Vec::new(), Vec::new());
            if lambda == 0.0 || kappa == 0.0 || training.width == 0 {
                // every unit is constant in x or absent, so only g = 0 is square integrable
                errors.push(constants.l2_sq);
                window.push(constants.l2_sq);
                rel.push(1.0);
            } else {
                let domain = ParameterDomain::new(lambda, kappa)?;
                for t in 0..training.trials.max(1) {
                    let seed = seeds::child(training.seed, &[row as u64, t as u64]);
                    let hidden = sample_hidden(&domain, training.width, seed)?;
                    let net = fit_hidden(hidden, &data, *rho, Solver::MinNormSvd, training.svd_threshold)?;
                    errors.push(l2_error_sq(f, &net)?);
                    window.push(window_error_sq(f, &net)?);
                    rel.push(net.relative_error(&data, Split::Train)?);
                }
            }
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            let min = errors.iter().copied().fold(f64::INFINITY, f64::min);
            Ok(BoundRow {
                lambda,
                kappa,
                s,
                mode,
                closed_form,
                quadrature_tail,
                empirical_error: mean(&errors),
                min_empirical_error: min,
                window_error: mean(&window),
                mean_relative_training_error: mean(&rel),
                trials: errors.len(),
                vacuous: closed_form <= 0.0,
                violation: min < quadrature_tail - EMPIRICAL_TOLERANCE * constants.l2_sq,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn theta_modes_are_reciprocal() {
        let a = theta_from(0.3, 1.7, 1.0, 1, BoundMode::AsPrinted).unwrap();
        let b = theta_from(0.3, 1.7, 1.0, 1, BoundMode::Corrected).unwrap();
        assert_relative_eq!(a * b, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn zero_target_constants() {
        let c = compute_constants(&TargetFunction::zero(), &Activation::dgauss(2, 1.0), 1.0, 1, &QuadratureSpec::default()).unwrap();
        assert_eq!(c.c0, 0.0);
        assert_eq!(c.c_inf, 0.0);
    }

    #[test]
    fn decay_constant_needs_vanishing() {
        assert!(rho_decay_constant(&Activation::dgauss(1, 1.0), 2.0, 1).is_err());
        assert!(rho_decay_constant(&Activation::dgauss(2, 1.0), 2.0, 1).is_ok());
    }

    #[test]
    fn parse_modes() {
        assert_eq!(BoundMode::parse("as-printed").unwrap(), BoundMode::AsPrinted);
        assert!(BoundMode::parse("loose").is_err());
    }
}

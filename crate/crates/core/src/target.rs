//! Target functions on the real line with their Fourier data and norms.
//!
//! Fourier transforms follow `f̂(ξ) = ∫ f(x) e^{-iξx} dx`. Compactly supported
//! kinds expose their derivative jumps so that spectral integrals can be closed
//! with the endpoint asymptotic expansion of `f̂`.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, Estimate, QuadratureSpec};

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;
const CHIRP_RATE: f64 = 22.0 * PI;

/// `t` with `exp(-t^2/2) = 1e-16`.
pub(crate) fn gaussian_tail_t() -> f64 {
    (2.0 * 16.0 * 10f64.ln()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBump {
    pub center: f64,
    pub scale: f64,
    pub amplitude: f64,
}

impl GaussianBump {
    pub fn new(center: f64, scale: f64, amplitude: f64) -> Self {
        GaussianBump {
            center,
            scale,
            amplitude,
        }
    }

    #[inline]
    fn eval(&self, x: f64) -> f64 {
        let t = (x - self.center) / self.scale;
        self.amplitude * (-0.5 * t * t).exp()
    }

    #[inline]
    fn d1(&self, x: f64) -> f64 {
        let t = (x - self.center) / self.scale;
        -t / self.scale * self.amplitude * (-0.5 * t * t).exp()
    }

    #[inline]
    fn d2(&self, x: f64) -> f64 {
        let t = (x - self.center) / self.scale;
        (t * t - 1.0) / (self.scale * self.scale) * self.amplitude * (-0.5 * t * t).exp()
    }

    #[inline]
    fn fourier(&self, xi: f64) -> Complex64 {
        let mag = self.amplitude * self.scale * SQRT_2PI * (-0.5 * self.scale * self.scale * xi * xi).exp();
        Complex64::from_polar(1.0, -xi * self.center) * mag
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetKind {
    GaussianBump(GaussianBump),
    GaussianMix { bumps: Vec<GaussianBump> },
    /// `0.5 cos(22πx²) + 0.5x²` on `[0, 1]`, zero elsewhere.
    Chirp,
    /// `amplitude · sin(frequency · x)` on `[lo, hi]`, zero elsewhere.
    WindowedSine {
        frequency: f64,
        lo: f64,
        hi: f64,
        amplitude: f64,
    },
    /// Piecewise-linear interpolant of samples, zero outside the grid.
    Tabulated { x: Vec<f64>, y: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetFunction {
    pub kind: TargetKind,
}

/// Jump of `f^{(j)}` for `j = 0..4` at a non-smooth point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub at: f64,
    pub values: [f64; 4],
}

impl TargetFunction {
    pub fn new(kind: TargetKind) -> Result<Self> {
        let f = TargetFunction { kind };
        f.validate()?;
        Ok(f)
    }

    pub fn zero() -> Self {
        TargetFunction {
            kind: TargetKind::GaussianMix { bumps: Vec::new() },
        }
    }

    pub fn gaussian(center: f64, scale: f64, amplitude: f64) -> Self {
        TargetFunction {
            kind: TargetKind::GaussianBump(GaussianBump::new(center, scale, amplitude)),
        }
    }

    pub fn mix(bumps: Vec<GaussianBump>) -> Self {
        TargetFunction {
            kind: TargetKind::GaussianMix { bumps },
        }
    }

    /// `0.2 exp(-(x-0.4)²/σ²) + 0.5 exp(-(x-0.6)²/σ²)`.
    pub fn sim1(sigma: f64) -> Self {
        let tau = sigma / 2f64.sqrt();
        Self::mix(vec![GaussianBump::new(0.4, tau, 0.2), GaussianBump::new(0.6, tau, 0.5)])
    }

    pub fn chirp() -> Self {
        TargetFunction { kind: TargetKind::Chirp }
    }

    pub fn windowed_sine(frequency: f64, lo: f64, hi: f64) -> Self {
        TargetFunction {
            kind: TargetKind::WindowedSine {
                frequency,
                lo,
                hi,
                amplitude: 1.0,
            },
        }
    }

    pub fn tabulated(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        Self::new(TargetKind::Tabulated { x, y })
    }

    /// Reads a two-column `x,value` CSV; a non-numeric first row is a header.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref())?;
        Self::from_csv_reader(file)
    }

    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(Error::Config(format!("row {} has fewer than two columns", i + 1)));
            }
            match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
                (Ok(x), Ok(y)) => {
                    xs.push(x);
                    ys.push(y);
                }
                _ if i == 0 => continue,
                _ => return Err(Error::Config(format!("row {} is not numeric", i + 1))),
            }
        }
        Self::tabulated(xs, ys)
    }

    /// Parses `gaussian:c,τ,A`, `mix:c,τ,A;c,τ,A`, `sim1:σ`, `chirp`,
    /// `sine:ω[,lo,hi]` or `csv:path`.
    pub fn parse(text: &str) -> Result<Self> {
        let (name, args) = match text.split_once(':') {
            Some((n, a)) => (n.trim(), a.trim()),
            None => (text.trim(), ""),
        };
        let nums = |s: &str| -> Result<Vec<f64>> {
            if s.is_empty() {
                return Ok(Vec::new());
            }
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("bad number '{t}' in target '{text}'")))
                })
                .collect()
        };
        let f = match name {
            "zero" => Self::zero(),
            "gaussian" => {
                let v = nums(args)?;
                if v.len() != 3 {
                    return Err(Error::Config(format!("gaussian needs center,scale,amplitude; got '{args}'")));
                }
                Self::gaussian(v[0], v[1], v[2])
            }
            "mix" => {
                let mut bumps = Vec::new();
                for part in args.split(';').filter(|p| !p.trim().is_empty()) {
                    let v = nums(part.trim())?;
                    if v.len() != 3 {
                        return Err(Error::Config(format!("mix component '{part}' needs three numbers")));
                    }
                    bumps.push(GaussianBump::new(v[0], v[1], v[2]));
                }
                Self::mix(bumps)
            }
            "sim1" => {
                let v = nums(args)?;
                Self::sim1(v.first().copied().unwrap_or(0.05))
            }
            "chirp" => Self::chirp(),
            "sine" => {
                let v = nums(args)?;
                let freq = v.first().copied().unwrap_or(2.0 * PI);
                let (lo, hi) = match v.len() {
                    0 | 1 => (0.0, 1.0),
                    3 => (v[1], v[2]),
                    _ => return Err(Error::Config("sine takes frequency[,lo,hi]".into())),
                };
                Self::windowed_sine(freq, lo, hi)
            }
            "csv" => Self::from_csv(args)?,
            other => return Err(Error::Config(format!("unknown target kind '{other}'"))),
        };
        f.validate()?;
        Ok(f)
    }

    pub fn descriptor(&self) -> String {
        match &self.kind {
            TargetKind::GaussianBump(g) => format!("gaussian:{},{},{}", g.center, g.scale, g.amplitude),
            TargetKind::GaussianMix { bumps } if bumps.is_empty() => "zero".into(),
            TargetKind::GaussianMix { bumps } => {
                let parts: Vec<String> = bumps
                    .iter()
                    .map(|g| format!("{},{},{}", g.center, g.scale, g.amplitude))
                    .collect();
                format!("mix:{}", parts.join(";"))
            }
            TargetKind::Chirp => "chirp".into(),
            TargetKind::WindowedSine { frequency, lo, hi, amplitude } => {
                format!("sine:{frequency},{lo},{hi} x{amplitude}")
            }
            TargetKind::Tabulated { x, .. } => format!("tabulated:{} nodes", x.len()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let check_bump = |g: &GaussianBump| -> Result<()> {
            if !(g.scale > 0.0 && g.scale.is_finite()) {
                return bad(format!("Gaussian scale must be positive, got {}", g.scale));
            }
            if !(g.amplitude.is_finite() && g.center.is_finite()) {
                return bad("Gaussian center and amplitude must be finite".into());
            }
            Ok(())
        };
        match &self.kind {
            TargetKind::GaussianBump(g) => check_bump(g),
            TargetKind::GaussianMix { bumps } => bumps.iter().try_for_each(check_bump),
            TargetKind::Chirp => Ok(()),
            TargetKind::WindowedSine { frequency, lo, hi, amplitude } => {
                if !(lo < hi) || !frequency.is_finite() || !amplitude.is_finite() {
                    return bad(format!("invalid windowed sine on [{lo}, {hi}]"));
                }
                Ok(())
            }
            TargetKind::Tabulated { x, y } => {
                if x.len() < 2 || x.len() != y.len() {
                    return bad(format!("tabulated target needs matching x/y of length >= 2, got {} and {}", x.len(), y.len()));
                }
                if x.windows(2).any(|w| !(w[1] > w[0])) {
                    return bad("tabulated grid must be strictly increasing".into());
                }
                if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
                    return bad("tabulated values must be finite".into());
                }
                Ok(())
            }
        }
    }

    /// Spatial dimension; every builtin kind lives on the real line.
    pub fn dimension(&self) -> usize {
        1
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            TargetKind::GaussianBump(g) => g.amplitude == 0.0,
            TargetKind::GaussianMix { bumps } => bumps.iter().all(|g| g.amplitude == 0.0),
            TargetKind::WindowedSine { amplitude, frequency, .. } => *amplitude == 0.0 || *frequency == 0.0,
            TargetKind::Tabulated { y, .. } => y.iter().all(|&v| v == 0.0),
            TargetKind::Chirp => false,
        }
    }

    pub fn is_compact(&self) -> bool {
        !matches!(self.kind, TargetKind::GaussianBump(_) | TargetKind::GaussianMix { .. })
    }

    /// `α f`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        let kind = match &self.kind {
            TargetKind::GaussianBump(g) => TargetKind::GaussianBump(GaussianBump { amplitude: g.amplitude * alpha, ..*g }),
            TargetKind::GaussianMix { bumps } => TargetKind::GaussianMix {
                bumps: bumps.iter().map(|g| GaussianBump { amplitude: g.amplitude * alpha, ..*g }).collect(),
            },
            TargetKind::WindowedSine { frequency, lo, hi, amplitude } => TargetKind::WindowedSine {
                frequency: *frequency,
                lo: *lo,
                hi: *hi,
                amplitude: amplitude * alpha,
            },
            TargetKind::Tabulated { x, y } => TargetKind::Tabulated {
                x: x.clone(),
                y: y.iter().map(|v| v * alpha).collect(),
            },
            TargetKind::Chirp => {
                return Err(Error::Precondition("the chirp target has a fixed amplitude".into()));
            }
        };
        Self::new(kind)
    }

    /// `f(· - h)` for the Gaussian kinds and tabulated data.
    pub fn shifted(&self, h: f64) -> Result<Self> {
        let kind = match &self.kind {
            TargetKind::GaussianBump(g) => TargetKind::GaussianBump(GaussianBump { center: g.center + h, ..*g }),
            TargetKind::GaussianMix { bumps } => TargetKind::GaussianMix {
                bumps: bumps.iter().map(|g| GaussianBump { center: g.center + h, ..*g }).collect(),
            },
            TargetKind::Tabulated { x, y } => TargetKind::Tabulated {
                x: x.iter().map(|v| v + h).collect(),
                y: y.clone(),
            },
            _ => return Err(Error::Precondition(format!("cannot shift {}", self.descriptor()))),
        };
        Self::new(kind)
    }

    /// Evaluates `f(x)`; tabulated targets reject points off their grid.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if let TargetKind::Tabulated { x: xs, .. } = &self.kind {
            let (lo, hi) = (xs[0], xs[xs.len() - 1]);
            if !(x >= lo && x <= hi) {
                return Err(Error::Domain {
                    quantity: "tabulated target",
                    value: x,
                    lo,
                    hi,
                });
            }
        }
        Ok(self.value(x))
    }

    /// `f(x)`, zero outside the support of compact kinds.
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        match &self.kind {
            TargetKind::GaussianBump(g) => g.eval(x),
            TargetKind::GaussianMix { bumps } => bumps.iter().map(|g| g.eval(x)).sum(),
            TargetKind::Chirp => {
                if (0.0..=1.0).contains(&x) {
                    0.5 * (CHIRP_RATE * x * x).cos() + 0.5 * x * x
                } else {
                    0.0
                }
            }
            TargetKind::WindowedSine { frequency, lo, hi, amplitude } => {
                if x >= *lo && x <= *hi {
                    amplitude * (frequency * x).sin()
                } else {
                    0.0
                }
            }
            TargetKind::Tabulated { x: xs, y } => interp(xs, y, x),
        }
    }

    /// `f'(x)` where it exists.
    pub fn derivative(&self, x: f64) -> Option<f64> {
        match &self.kind {
            TargetKind::GaussianBump(g) => Some(g.d1(x)),
            TargetKind::GaussianMix { bumps } => Some(bumps.iter().map(|g| g.d1(x)).sum()),
            TargetKind::Chirp => Some(if (0.0..=1.0).contains(&x) { chirp_derivative(x) } else { 0.0 }),
            TargetKind::WindowedSine { frequency, lo, hi, amplitude } => Some(if x >= *lo && x <= *hi {
                amplitude * frequency * (frequency * x).cos()
            } else {
                0.0
            }),
            TargetKind::Tabulated { .. } => None,
        }
    }

    /// `f''(x)` for the smooth kinds.
    pub fn second_derivative(&self, x: f64) -> Option<f64> {
        match &self.kind {
            TargetKind::GaussianBump(g) => Some(g.d2(x)),
            TargetKind::GaussianMix { bumps } => Some(bumps.iter().map(|g| g.d2(x)).sum()),
            _ => None,
        }
    }

    /// Interval outside which `|f|` is below `1e-16` of its scale (exact for compact kinds).
    pub fn effective_support(&self) -> (f64, f64) {
        let t = gaussian_tail_t();
        match &self.kind {
            TargetKind::GaussianBump(g) => (g.center - t * g.scale, g.center + t * g.scale),
            TargetKind::GaussianMix { bumps } if bumps.is_empty() => (0.0, 1.0),
            TargetKind::GaussianMix { bumps } => bumps.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), g| {
                (lo.min(g.center - t * g.scale), hi.max(g.center + t * g.scale))
            }),
            TargetKind::Chirp => (0.0, 1.0),
            TargetKind::WindowedSine { lo, hi, .. } => (*lo, *hi),
            TargetKind::Tabulated { x, .. } => (x[0], x[x.len() - 1]),
        }
    }

    /// Points inside the support where `f` is not smooth, plus the support ends.
    pub fn breakpoints(&self) -> Vec<f64> {
        let (lo, hi) = self.effective_support();
        match &self.kind {
            TargetKind::Tabulated { x, .. } => x.clone(),
            _ => vec![lo, hi],
        }
    }

    /// Smallest length on which the graph changes appreciably.
    pub fn length_scale(&self) -> f64 {
        match &self.kind {
            TargetKind::GaussianBump(g) => g.scale,
            TargetKind::GaussianMix { bumps } => bumps.iter().map(|g| g.scale).fold(1.0, f64::min),
            TargetKind::Chirp => 1.0 / 22.0,
            TargetKind::WindowedSine { frequency, lo, hi, .. } => {
                let len = hi - lo;
                if *frequency == 0.0 {
                    len
                } else {
                    (2.0 * PI / frequency.abs()).min(len)
                }
            }
            TargetKind::Tabulated { x, .. } => x.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min),
        }
    }

    /// Largest local angular frequency of a compact kind.
    fn local_frequency(&self) -> f64 {
        match &self.kind {
            TargetKind::Chirp => 2.0 * CHIRP_RATE,
            TargetKind::WindowedSine { frequency, .. } => frequency.abs(),
            _ => 0.0,
        }
    }

    /// S(ξ) beyond which `|f̂|` is below `1e-16` of `|f̂|`'s bound, for the Gaussian kinds.
    pub fn bandwidth(&self) -> Option<f64> {
        match &self.kind {
            TargetKind::GaussianBump(g) => Some(gaussian_tail_t() / g.scale),
            TargetKind::GaussianMix { bumps } if bumps.is_empty() => Some(1.0),
            TargetKind::GaussianMix { bumps } => {
                let tmin = bumps.iter().map(|g| g.scale).fold(f64::INFINITY, f64::min);
                Some(gaussian_tail_t() / tmin)
            }
            _ => None,
        }
    }

    /// Derivative jumps at the non-smooth points of a compact kind.
    pub fn jumps(&self) -> Option<Vec<Jump>> {
        match &self.kind {
            TargetKind::Chirp => {
                let r = CHIRP_RATE;
                let d = |x: f64| -> [f64; 4] {
                    let (s, c) = (r * x * x).sin_cos();
                    [
                        0.5 * c + 0.5 * x * x,
                        -r * x * s + x,
                        -r * s - 2.0 * r * r * x * x * c + 1.0,
                        -6.0 * r * r * x * c + 4.0 * r * r * r * x * x * x * s,
                    ]
                };
                let (a, b) = (d(0.0), d(1.0));
                Some(vec![
                    Jump { at: 0.0, values: a },
                    Jump {
                        at: 1.0,
                        values: [-b[0], -b[1], -b[2], -b[3]],
                    },
                ])
            }
            TargetKind::WindowedSine { frequency: w, lo, hi, amplitude } => {
                let d = |x: f64| -> [f64; 4] {
                    let mut out = [0.0; 4];
                    for (j, o) in out.iter_mut().enumerate() {
                        *o = amplitude * w.powi(j as i32) * (w * x + j as f64 * PI / 2.0).sin();
                    }
                    out
                };
                let (a, b) = (d(*lo), d(*hi));
                Some(vec![
                    Jump { at: *lo, values: a },
                    Jump {
                        at: *hi,
                        values: [-b[0], -b[1], -b[2], -b[3]],
                    },
                ])
            }
            TargetKind::Tabulated { x, y } => {
                let n = x.len();
                let slope = |k: usize| (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
                let mut out = Vec::with_capacity(n);
                for k in 0..n {
                    let left = if k == 0 { 0.0 } else { slope(k - 1) };
                    let right = if k + 1 == n { 0.0 } else { slope(k) };
                    let j0 = if k == 0 {
                        y[0]
                    } else if k + 1 == n {
                        -y[n - 1]
                    } else {
                        0.0
                    };
                    out.push(Jump {
                        at: x[k],
                        values: [j0, right - left, 0.0, 0.0],
                    });
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// Lowest derivative order with a nonzero jump.
    fn leading_jump_order(jumps: &[Jump]) -> usize {
        (0..4)
            .find(|&j| jumps.iter().any(|q| q.values[j].abs() > 1e-12 * (1.0 + q.values[j].abs())))
            .unwrap_or(4)
    }

    /// Fourier transform at `ξ` to `spec` for quadrature-backed kinds.
    pub fn fourier_with(&self, xi: f64, spec: &QuadratureSpec) -> Result<Complex64> {
        if !self.is_compact() {
            return Ok(self.fourier_fast(xi));
        }
        if let TargetKind::Tabulated { .. } = self.kind {
            return Ok(self.fourier_fast(xi));
        }
        let (lo, hi) = self.effective_support();
        let freq = xi.abs() + self.local_frequency();
        let panels = ((hi - lo) * freq / (2.0 * PI)).ceil() as usize + 1;
        let spec = spec.with_panels(panels.max(spec.initial_panels));
        let e = quad::integrate(|x: f64| Complex64::from_polar(self.value(x), -xi * x), lo, hi, &spec)?;
        Ok(e.value)
    }

    pub fn fourier(&self, xi: f64) -> Result<Complex64> {
        self.fourier_with(xi, &QuadratureSpec::with_tol(1e-12))
    }

    /// Fourier transform by exact formula or by a fixed rule sized to the oscillation.
    pub fn fourier_fast(&self, xi: f64) -> Complex64 {
        match &self.kind {
            TargetKind::GaussianBump(g) => g.fourier(xi),
            TargetKind::GaussianMix { bumps } => bumps.iter().map(|g| g.fourier(xi)).sum(),
            TargetKind::Tabulated { x, y } => tabulated_fourier(x, y, xi),
            TargetKind::WindowedSine { frequency: w, lo, hi, amplitude } => {
                let window = |k: f64| {
                    let t = 0.5 * k * (hi - lo);
                    let sinc = if t.abs() < 1e-4 { 1.0 - t * t / 6.0 } else { t.sin() / t };
                    Complex64::from_polar((hi - lo) * sinc, 0.5 * k * (lo + hi))
                };
                (window(w - xi) - window(-w - xi)) * Complex64::new(0.0, -0.5 * amplitude)
            }
            _ => {
                let (lo, hi) = self.effective_support();
                let freq = xi.abs() + self.local_frequency();
                let panels = ((hi - lo) * freq / (2.0 * PI)).ceil() as usize + 2;
                quad::gl_fixed(|x: f64| Complex64::from_polar(self.value(x), -xi * x), lo, hi, panels, 24)
            }
        }
    }

    /// `∫ f`.
    pub fn integral(&self) -> f64 {
        self.fourier_fast(0.0).re
    }

    pub fn l1_norm(&self) -> Result<Estimate<f64>> {
        match &self.kind {
            TargetKind::GaussianBump(g) => Ok(exact(g.amplitude.abs() * g.scale * SQRT_2PI)),
            TargetKind::GaussianMix { bumps }
                if bumps.iter().all(|g| g.amplitude >= 0.0) || bumps.iter().all(|g| g.amplitude <= 0.0) =>
            {
                Ok(exact(bumps.iter().map(|g| g.amplitude.abs() * g.scale * SQRT_2PI).sum()))
            }
            _ => self.spatial_integral(|v| v.abs()),
        }
    }

    pub fn l2_norm(&self) -> Result<Estimate<f64>> {
        let bumps: Vec<GaussianBump> = match &self.kind {
            TargetKind::GaussianBump(g) => vec![*g],
            TargetKind::GaussianMix { bumps } => bumps.clone(),
            _ => {
                let e = self.spatial_integral(|v| v * v)?;
                let v = e.value.max(0.0).sqrt();
                return Ok(Estimate {
                    value: v,
                    error: if v > 0.0 { e.error / (2.0 * v) } else { e.error.sqrt() },
                    evaluations: e.evaluations,
                });
            }
        };
        let mut sq = 0.0;
        for a in &bumps {
            for b in &bumps {
                let s2 = a.scale * a.scale + b.scale * b.scale;
                let d = a.center - b.center;
                sq += a.amplitude * b.amplitude * (2.0 * PI * a.scale * a.scale * b.scale * b.scale / s2).sqrt()
                    * (-d * d / (2.0 * s2)).exp();
            }
        }
        Ok(exact(sq.max(0.0).sqrt()))
    }

    /// `max |f|` from a dense sample of the support.
    pub fn sup_norm(&self) -> f64 {
        let (lo, hi) = self.effective_support();
        let n = (((hi - lo) / self.length_scale()) * 64.0).ceil().clamp(2048.0, 2e6) as usize;
        let mut m: f64 = 0.0;
        for i in 0..=n {
            m = m.max(self.value(lo + (hi - lo) * i as f64 / n as f64).abs());
        }
        for p in self.breakpoints() {
            m = m.max(self.value(p).abs());
        }
        m
    }

    fn spatial_integral(&self, h: impl Fn(f64) -> f64) -> Result<Estimate<f64>> {
        let (lo, hi) = self.effective_support();
        let panels = ((hi - lo) / self.length_scale()).ceil() as usize + 1;
        let spec = QuadratureSpec::with_tol(1e-12).with_panels(panels.min(4096));
        let g = |x: f64| h(self.value(x));
        match &self.kind {
            TargetKind::Tabulated { x, .. } => {
                let spec = QuadratureSpec::with_tol(1e-12);
                quad::integrate_pieces(g, x, &spec)
            }
            _ => quad::integrate(g, lo, hi, &spec),
        }
    }

    /// `‖f‖_{H^s} = (∫ |f̂(ξ)|² (1+ξ²)^s dξ)^{1/2}`.
    pub fn sobolev_norm(&self, s: f64) -> Result<Estimate<f64>> {
        let e = self.spectral_energy(s, Side::Full)?;
        let v = e.value.max(0.0).sqrt();
        Ok(Estimate {
            value: v,
            error: if v > 0.0 { e.error / (2.0 * v) } else { e.error.sqrt() },
            evaluations: e.evaluations,
        })
    }

    /// `∫ |f̂(ξ)|² (1+ξ²)^s dξ` over the whole line or one half of it.
    pub fn spectral_energy(&self, s: f64, side: Side) -> Result<Estimate<f64>> {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::Precondition(format!("smoothness s must be a finite non-negative number, got {s}")));
        }
        if self.is_zero() {
            return Ok(Estimate::zero());
        }
        let w = |xi: f64| self.fourier_fast(xi).norm_sqr() * (1.0 + xi * xi).powf(s);
        if let Some(xi_max) = self.spectral_cutoff(s) {
            let spread = self.spread();
            let panels = (xi_max * spread / PI).ceil() as usize + 4;
            let spec = QuadratureSpec::with_tol(1e-12).with_panels(panels.min(8192));
            let (a, b) = side.range(xi_max);
            return quad::integrate(w, a, b, &spec).map_err(|e| rename(e, "Sobolev norm"));
        }
        let jumps = self.jumps().expect("compact kinds carry jump data");
        let jstar = Self::leading_jump_order(&jumps);
        if s >= jstar as f64 + 0.5 {
            return Err(Error::ToleranceNotMet {
                quantity: format!(
                    "Sobolev norm: s = {s} diverges for {} (spectrum decays like |ξ|^-{})",
                    self.descriptor(),
                    jstar + 1
                ),
                achieved: f64::INFINITY,
                estimate: f64::INFINITY,
                tolerance: 0.0,
            });
        }
        let (lo, hi) = self.effective_support();
        let len = hi - lo;
        let xi_c = 6.0 * self.local_frequency() + 100.0 / len;
        let panels = (xi_c * len / PI).ceil() as usize + 4;
        let spec = QuadratureSpec::with_tol(1e-12).with_panels(panels.min(16384));
        let (a, b) = side.range(xi_c);
        let core = quad::integrate(w, a, b, &spec).map_err(|e| rename(e, "Sobolev norm"))?;
        let far = 64.0 * xi_c;
        let tail_spec = QuadratureSpec::with_tol(1e-10).with_panels((((far - xi_c) * len / PI).ceil() as usize + 4).min(65536 / 2));
        let asym = |xi: f64| asymptotic_fourier(&jumps, xi).norm_sqr() * (1.0 + xi * xi).powf(s);
        let mut total = core;
        let mut add_side = |sign: f64| -> Result<()> {
            let t = quad::integrate(|u: f64| asym(sign * u), xi_c, far, &tail_spec).map_err(|e| rename(e, "Sobolev tail"))?;
            let q = 2.0 * jstar as f64 + 1.0 - 2.0 * s;
            let lead: f64 = jumps.iter().map(|j| j.values[jstar] * j.values[jstar]).sum();
            let rest = lead * far.powf(-q) / q;
            total.value += t.value + rest;
            total.error += t.error + 1e-2 * rest.abs();
            total.evaluations += t.evaluations;
            Ok(())
        };
        match side {
            Side::Full => {
                add_side(1.0)?;
                add_side(-1.0)?;
            }
            Side::Positive => add_side(1.0)?,
            Side::Negative => add_side(-1.0)?,
        }
        Ok(total)
    }

    /// For the Gaussian kinds, the frequency where `|f̂|²(1+ξ²)^s` falls below `1e-16` of its peak.
    fn spectral_cutoff(&self, s: f64) -> Option<f64> {
        let bumps: Vec<GaussianBump> = match &self.kind {
            TargetKind::GaussianBump(g) => vec![*g],
            TargetKind::GaussianMix { bumps } => bumps.clone(),
            _ => return None,
        };
        let env = |xi: f64| -> f64 {
            let m: f64 = bumps
                .iter()
                .map(|g| g.amplitude.abs() * g.scale * (-0.5 * g.scale * g.scale * xi * xi).exp())
                .sum();
            m * m * (1.0 + xi * xi).powf(s)
        };
        let tmin = bumps.iter().map(|g| g.scale).fold(f64::INFINITY, f64::min);
        let step = 0.05 / tmin;
        let mut peak = env(0.0);
        let mut xi = 0.0;
        loop {
            xi += step;
            let v = env(xi);
            peak = peak.max(v);
            if v < 1e-16 * peak && xi * tmin > 1.0 {
                return Some(xi);
            }
        }
    }

    /// Largest distance between features, which sets the oscillation period of `|f̂|²`.
    fn spread(&self) -> f64 {
        match &self.kind {
            TargetKind::GaussianMix { bumps } if !bumps.is_empty() => {
                let lo = bumps.iter().map(|g| g.center).fold(f64::INFINITY, f64::min);
                let hi = bumps.iter().map(|g| g.center).fold(f64::NEG_INFINITY, f64::max);
                let tmax = bumps.iter().map(|g| g.scale).fold(0.0, f64::max);
                (hi - lo).max(tmax)
            }
            _ => {
                let (lo, hi) = self.effective_support();
                (hi - lo).max(self.length_scale())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Full,
    Positive,
    Negative,
}

impl Side {
    fn range(self, r: f64) -> (f64, f64) {
        match self {
            Side::Full => (-r, r),
            Side::Positive => (0.0, r),
            Side::Negative => (-r, 0.0),
        }
    }
}

fn exact(v: f64) -> Estimate<f64> {
    Estimate {
        value: v,
        error: 0.0,
        evaluations: 0,
    }
}

fn rename(e: Error, what: &str) -> Error {
    match e {
        Error::ToleranceNotMet {
            quantity,
            achieved,
            estimate,
            tolerance,
        } => Error::ToleranceNotMet {
            quantity: format!("{what} ({quantity})"),
            achieved,
            estimate,
            tolerance,
        },
        other => other,
    }
}

/// `Σ_k e^{-iξx_k} Σ_j J_{k,j} / (iξ)^{j+1}`.
pub fn asymptotic_fourier(jumps: &[Jump], xi: f64) -> Complex64 {
    let inv = Complex64::new(0.0, xi).inv();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in jumps {
        let mut p = inv;
        let mut s = Complex64::new(0.0, 0.0);
        for &v in &j.values {
            s += p * v;
            p *= inv;
        }
        acc += Complex64::from_polar(1.0, -xi * j.at) * s;
    }
    acc
}

#[inline]
fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if !(x >= xs[0] && x <= xs[n - 1]) {
        return 0.0;
    }
    let k = match xs.partition_point(|&v| v <= x) {
        0 => 0,
        i if i >= n => n - 2,
        i => i - 1,
    };
    let t = (x - xs[k]) / (xs[k + 1] - xs[k]);
    ys[k] + t * (ys[k + 1] - ys[k])
}

fn tabulated_fourier(xs: &[f64], ys: &[f64], xi: f64) -> Complex64 {
    let n = xs.len();
    let hmax = xs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if xi.abs() * hmax >= 1.0 {
        let mut acc = Complex64::new(0.0, 0.0);
        let inv = Complex64::new(0.0, xi).inv();
        for k in 0..n - 1 {
            // exact integral of the linear piece against e^{-iξx}
            let s = (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]);
            let prim = |x: f64, y: f64| Complex64::from_polar(1.0, -xi * x) * (-(y * inv) - s * inv * inv);
            acc += prim(xs[k + 1], ys[k + 1]) - prim(xs[k], ys[k]);
        }
        return acc;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n - 1 {
        let (a, b) = (xs[k], xs[k + 1]);
        acc += quad::gl_fixed(
            |x: f64| Complex64::from_polar(interp(xs, ys, x.clamp(a, b)), -xi * x),
            a,
            b,
            1,
            8,
        );
    }
    acc
}

/// `g'(x)` of the chirp target on `[0, 1]`.
pub fn chirp_derivative(x: f64) -> f64 {
    -CHIRP_RATE * x * (CHIRP_RATE * x * x).sin() + x
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sim1_value_at_first_center() {
        let f = TargetFunction::sim1(0.05);
        let expect = 0.2 + 0.5 * (-0.04f64 / 0.0025).exp();
        assert_relative_eq!(f.eval(0.4).unwrap(), expect, max_relative = 1e-15);
    }

    #[test]
    fn chirp_endpoint_and_derivative() {
        let f = TargetFunction::chirp();
        assert_eq!(f.eval(0.0).unwrap(), 0.5);
        let h = 1e-6;
        for &x in &[0.2, 0.55, 0.9] {
            let fd = (f.value(x + h) - f.value(x - h)) / (2.0 * h);
            assert_relative_eq!(f.derivative(x).unwrap(), fd, max_relative = 1e-6, epsilon = 1e-6);
        }
        let expect = -22.0 * PI * 0.3 * (22.0 * PI * 0.09f64).sin() + 0.3;
        assert_relative_eq!(chirp_derivative(0.3), expect, max_relative = 1e-12);
    }

    #[test]
    fn gaussian_peak() {
        assert_eq!(TargetFunction::gaussian(0.0, 1.0, 1.0).eval(0.0).unwrap(), 1.0);
    }

    #[test]
    fn tabulated_domain_error() {
        let f = TargetFunction::tabulated(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(f.eval(0.5).unwrap(), 0.5);
        assert!(matches!(f.eval(2.5), Err(Error::Domain { .. })));
    }

    #[test]
    fn csv_with_and_without_header() {
        let a = TargetFunction::from_csv_reader("x,value\n0,0\n1,2\n2,0\n".as_bytes()).unwrap();
        let b = TargetFunction::from_csv_reader("0,0\n1,2\n2,0\n".as_bytes()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.eval(1.5).unwrap(), 1.0);
        assert!(TargetFunction::from_csv_reader("0,0\n1,x\n".as_bytes()).is_err());
    }

    #[test]
    fn tabulated_fourier_both_branches_agree() {
        let x: Vec<f64> = (0..21).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|v| (v * 2.0f64).sin()).collect();
        let f = TargetFunction::tabulated(x, y).unwrap();
        for &xi in &[9.99, 10.01, 3.0, 40.0] {
            let brute: Complex64 = quad::gl_fixed(|t: f64| Complex64::from_polar(f.value(t), -xi * t), 0.0, 2.0, 2000, 8);
            assert!((f.fourier_fast(xi) - brute).norm() < 1e-6, "ξ = {xi}");
        }
    }

    #[test]
    fn windowed_sine_transform_matches_quadrature() {
        let f = TargetFunction::windowed_sine(2.0 * PI, -0.3, 1.1);
        for &xi in &[0.0, 1e-7, 2.0 * PI, -2.0 * PI, 17.0, -250.0] {
            let brute: Complex64 = quad::gl_fixed(|t: f64| Complex64::from_polar(f.value(t), -xi * t), -0.3, 1.1, 400, 16);
            assert!((f.fourier_fast(xi) - brute).norm() < 1e-12, "ξ = {xi}");
        }
    }

    #[test]
    fn jump_expansion_matches_transform() {
        for f in [TargetFunction::chirp(), TargetFunction::windowed_sine(2.0 * PI, 0.0, 1.0)] {
            let j = f.jumps().unwrap();
            let xi = 4000.0;
            let a = asymptotic_fourier(&j, xi);
            let b = f.fourier_fast(xi);
            assert!((a - b).norm() < 1e-6 * b.norm().max(1e-8), "{}: {a} vs {b}", f.descriptor());
        }
    }

    #[test]
    fn parse_descriptors() {
        assert_eq!(TargetFunction::parse("gaussian:0.5,0.1,1").unwrap(), TargetFunction::gaussian(0.5, 0.1, 1.0));
        assert_eq!(TargetFunction::parse("sim1:0.05").unwrap(), TargetFunction::sim1(0.05));
        assert_eq!(TargetFunction::parse("chirp").unwrap(), TargetFunction::chirp());
        assert!(TargetFunction::parse("gaussian:1,0,1").is_err());
        assert!(TargetFunction::parse("bessel").is_err());
        let m = TargetFunction::parse("mix:0,1,1;2,0.5,-1").unwrap();
        assert_eq!(TargetFunction::parse(&m.descriptor()).unwrap(), m);
    }

    #[test]
    fn divergent_sobolev_rejected() {
        let err = TargetFunction::chirp().sobolev_norm(1.0).unwrap_err();
        assert!(matches!(err, Error::ToleranceNotMet { .. }));
    }
}

//! Scalar activations and the admissible functions paired with them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Activation {
    Sigmoid,
    Tanh,
    Relu,
    /// `exp(-z^2 / (2 width^2))`
    Gaussian { width: f64 },
    /// `scale * d^order/dz^order exp(-z^2 / (2 width^2))`
    GaussianDerivative { order: u32, width: f64, scale: f64 },
}

/// Probabilists' Hermite polynomial `He_n`.
pub fn hermite_he(n: u32, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return p0;
    }
    for k in 1..n {
        let p2 = x * p1 - k as f64 * p0;
        p0 = p1;
        p1 = p2;
    }
    p1
}

impl Activation {
    pub fn dgauss(order: u32, width: f64) -> Self {
        Activation::GaussianDerivative {
            order,
            width,
            scale: 1.0,
        }
    }

    /// Parses `sigmoid`, `tanh`, `relu`, `gaussian[:w]` or `dgauss:n[,w[,scale]]`.
    pub fn parse(text: &str) -> Result<Self> {
        let (name, args) = match text.split_once(':') {
            Some((n, a)) => (n.trim(), a),
            None => (text.trim(), ""),
        };
        let nums: Vec<f64> = if args.trim().is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("bad number '{t}' in activation '{text}'")))
                })
                .collect::<Result<_>>()?
        };
        let act = match name {
            "sigmoid" => Activation::Sigmoid,
            "tanh" => Activation::Tanh,
            "relu" => Activation::Relu,
            "gaussian" => Activation::Gaussian {
                width: nums.first().copied().unwrap_or(1.0),
            },
            "dgauss" => {
                let order = *nums
                    .first()
                    .ok_or_else(|| Error::Config("dgauss needs an order".into()))?;
                if order < 0.0 || order.fract() != 0.0 {
                    return Err(Error::Config(format!("dgauss order must be a non-negative integer, got {order}")));
                }
                Activation::GaussianDerivative {
                    order: order as u32,
                    width: nums.get(1).copied().unwrap_or(1.0),
                    scale: nums.get(2).copied().unwrap_or(1.0),
                }
            }
            other => return Err(Error::Config(format!("unknown activation '{other}'"))),
        };
        act.validate()?;
        Ok(act)
    }

    pub fn descriptor(&self) -> String {
        match *self {
            Activation::Sigmoid => "sigmoid".into(),
            Activation::Tanh => "tanh".into(),
            Activation::Relu => "relu".into(),
            Activation::Gaussian { width } => format!("gaussian:{width}"),
            Activation::GaussianDerivative { order, width, scale } => {
                format!("dgauss:{order},{width},{scale}")
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Activation::Gaussian { width } | Activation::GaussianDerivative { width, .. }
                if !(width > 0.0 && width.is_finite()) =>
            {
                Err(Error::Config(format!("activation width must be positive, got {width}")))
            }
            Activation::GaussianDerivative { scale, .. } if !scale.is_finite() => {
                Err(Error::Config("activation scale must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        match *self {
            Activation::GaussianDerivative { order, width, scale } => Ok(Activation::GaussianDerivative {
                order,
                width,
                scale: scale * factor,
            }),
            _ => Err(Error::Precondition(format!(
                "only Gaussian derivatives carry a scale, got {}",
                self.descriptor()
            ))),
        }
    }

    #[inline]
    pub fn eval(&self, z: f64) -> f64 {
        match *self {
            Activation::Sigmoid => {
                if z >= 0.0 {
                    1.0 / (1.0 + (-z).exp())
                } else {
                    let e = z.exp();
                    e / (1.0 + e)
                }
            }
            Activation::Tanh => z.tanh(),
            Activation::Relu => z.max(0.0),
            Activation::Gaussian { width } => {
                let t = z / width;
                (-0.5 * t * t).exp()
            }
            Activation::GaussianDerivative { order, width, scale } => {
                let t = z / width;
                let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
                scale * sign * width.powi(-(order as i32)) * hermite_he(order, t) * (-0.5 * t * t).exp()
            }
        }
    }

    /// First derivative in `z`.
    #[inline]
    pub fn derivative(&self, z: f64) -> f64 {
        match *self {
            Activation::Sigmoid => {
                let s = self.eval(z);
                s * (1.0 - s)
            }
            Activation::Tanh => {
                let t = z.tanh();
                1.0 - t * t
            }
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Gaussian { width } => {
                let t = z / width;
                -t / width * (-0.5 * t * t).exp()
            }
            Activation::GaussianDerivative { order, width, scale } => Activation::GaussianDerivative {
                order: order + 1,
                width,
                scale,
            }
            .eval(z),
        }
    }

    /// Fourier transform `∫ σ(z) e^{-iωz} dz`, when it is a function.
    pub fn fourier(&self, omega: f64) -> Option<Complex64> {
        match *self {
            Activation::Gaussian { width } => {
                Some(Complex64::new(width * SQRT_2PI * (-0.5 * width * width * omega * omega).exp(), 0.0))
            }
            Activation::GaussianDerivative { order, width, scale } => {
                let g = scale * width * SQRT_2PI * (-0.5 * width * width * omega * omega).exp();
                Some(Complex64::new(0.0, omega).powu(order) * g)
            }
            _ => None,
        }
    }

    pub fn has_fourier(&self) -> bool {
        self.fourier(0.0).is_some()
    }

    /// Degree `k` with `σ(αz) = α^k σ(z)` for `α > 0`.
    pub fn homogeneity(&self) -> Option<u32> {
        match self {
            Activation::Relu => Some(1),
            _ => None,
        }
    }

    /// Radius beyond which `|σ|` is below `1e-16` of its sup.
    pub fn effective_half_width(&self) -> Option<f64> {
        match *self {
            Activation::Gaussian { width } => Some(width * (2.0 * 16.0 * 10f64.ln()).sqrt()),
            Activation::GaussianDerivative { order, width, .. } => {
                let peak = unit_sup(order);
                let mut t = (2.0 * 16.0 * 10f64.ln()).sqrt();
                while hermite_he(order, t).abs() * (-0.5 * t * t).exp() > 1e-16 * peak {
                    t += 0.25;
                }
                Some(width * t)
            }
            _ => None,
        }
    }

    /// Frequency beyond which `|σ̂|` is below `1e-16` of its peak.
    pub fn spectral_cutoff(&self) -> Option<f64> {
        match *self {
            Activation::Gaussian { width } => Some((2.0 * 16.0 * 10f64.ln()).sqrt() / width),
            Activation::GaussianDerivative { order, width, .. } => {
                let n = order as f64;
                let env = |t: f64| if n == 0.0 { (-0.5 * t * t).exp() } else { t.powf(n) * (-0.5 * t * t).exp() };
                let peak = env(n.sqrt());
                let mut t = n.sqrt().max(1.0);
                while env(t) > 1e-16 * peak {
                    t += 0.25;
                }
                Some(t / width)
            }
            _ => None,
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match *self {
            Activation::Sigmoid | Activation::Tanh => 1.0,
            Activation::Relu => f64::INFINITY,
            Activation::Gaussian { .. } => 1.0,
            Activation::GaussianDerivative { order, width, scale } => {
                scale.abs() * width.powi(-(order as i32)) * unit_sup(order)
            }
        }
    }

    pub fn l1_norm(&self) -> f64 {
        match *self {
            Activation::Sigmoid | Activation::Tanh | Activation::Relu => f64::INFINITY,
            Activation::Gaussian { width } => width * SQRT_2PI,
            Activation::GaussianDerivative { order, width, .. } => {
                let h = self.effective_half_width().unwrap_or(40.0 * width);
                // the zeros of He_n are not panel edges, so use many panels
                crate::quad::gl_fixed(|z: f64| self.eval(z).abs(), -h, h, 2048 * (order as usize + 1), 16)
            }
        }
    }

    /// Smallest length scale of the graph, for panel sizing.
    pub fn length_scale(&self) -> f64 {
        match *self {
            Activation::Gaussian { width } => width,
            Activation::GaussianDerivative { order, width, .. } => width / (1.0 + order as f64).sqrt(),
            _ => 1.0,
        }
    }

    pub fn is_even(&self) -> Option<bool> {
        match *self {
            Activation::Gaussian { .. } => Some(true),
            Activation::GaussianDerivative { order, .. } => Some(order % 2 == 0),
            Activation::Tanh => Some(false),
            _ => None,
        }
    }
}

/// `sup |He_n(t) exp(-t^2/2)|`.
fn unit_sup(order: u32) -> f64 {
    let f = |t: f64| (hermite_he(order, t) * (-0.5 * t * t).exp()).abs();
    let hi = 2.0 * (order as f64 + 1.0).sqrt() + 2.0;
    let steps = 4000;
    let h = hi / steps as f64;
    let mut best = (0.0, f(0.0));
    for i in 1..=steps {
        let t = h * i as f64;
        let v = f(t);
        if v > best.1 {
            best = (t, v);
        }
    }
    // golden-section polish around the best sample
    let (mut a, mut b) = ((best.0 - h).max(0.0), best.0 + h);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b)).max(best.1)
}

/// Activation `σ` with the function `ρ` used to analyse it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActivationProfile {
    pub sigma: Activation,
    pub rho: Activation,
}

impl ActivationProfile {
    pub fn new(sigma: Activation, rho: Activation) -> Self {
        ActivationProfile { sigma, rho }
    }

    pub fn self_paired(act: Activation) -> Self {
        ActivationProfile { sigma: act, rho: act }
    }

    pub fn fourier_sigma(&self, omega: f64) -> Option<Complex64> {
        self.sigma.fourier(omega)
    }

    pub fn fourier_rho(&self, omega: f64) -> Option<Complex64> {
        self.rho.fourier(omega)
    }

    pub fn homogeneity_k(&self) -> Option<u32> {
        self.sigma.homogeneity()
    }
}

/// Volume of the unit ball in `m` dimensions.
pub fn unit_ball_volume(m: usize) -> f64 {
    let h = m as f64 / 2.0;
    PI.powf(h) / libm::tgamma(h + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hermite_low_orders() {
        assert_eq!(hermite_he(0, 3.0), 1.0);
        assert_eq!(hermite_he(1, 3.0), 3.0);
        assert_eq!(hermite_he(2, 3.0), 8.0);
        assert_eq!(hermite_he(3, 2.0), 2.0);
    }

    #[test]
    fn dgauss_matches_finite_difference() {
        let base = Activation::Gaussian { width: 0.7 };
        let d1 = Activation::dgauss(1, 0.7);
        let d2 = Activation::dgauss(2, 0.7);
        let h = 1e-5;
        for &z in &[-1.3, 0.2, 0.9] {
            let fd1 = (base.eval(z + h) - base.eval(z - h)) / (2.0 * h);
            let fd2 = (base.eval(z + h) - 2.0 * base.eval(z) + base.eval(z - h)) / (h * h);
            assert_relative_eq!(d1.eval(z), fd1, max_relative = 1e-8);
            assert_relative_eq!(d2.eval(z), fd2, max_relative = 1e-4);
            assert_relative_eq!(d1.derivative(z), d2.eval(z), max_relative = 1e-12);
        }
    }

    #[test]
    fn dgauss_fourier_matches_quadrature() {
        let act = Activation::dgauss(2, 1.3);
        for &w in &[0.0, 0.4, 1.7] {
            let q: Complex64 = crate::quad::gl_fixed(
                |z: f64| Complex64::from_polar(act.eval(z), -w * z),
                -20.0,
                20.0,
                64,
                32,
            );
            let a = act.fourier(w).unwrap();
            assert!((q - a).norm() < 1e-12, "{w}: {q} vs {a}");
        }
    }

    #[test]
    fn sup_norms() {
        assert_relative_eq!(Activation::dgauss(1, 1.0).sup_norm(), (-0.5f64).exp(), max_relative = 1e-12);
        assert_relative_eq!(Activation::dgauss(2, 1.0).sup_norm(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(Activation::dgauss(1, 2.0).sup_norm(), 0.5 * (-0.5f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn l1_of_first_derivative() {
        assert_relative_eq!(Activation::dgauss(1, 1.0).l1_norm(), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn relu_homogeneous() {
        let r = Activation::Relu;
        let k = r.homogeneity().unwrap() as i32;
        for &(alpha, z) in &[(2.0, 0.3), (0.5, -1.0), (3.0, 1.7)] {
            assert_relative_eq!(r.eval(alpha * z), alpha.powi(k) * r.eval(z));
        }
    }

    #[test]
    fn parse_roundtrip() {
        let a = Activation::parse("dgauss:1,1").unwrap();
        assert_eq!(a, Activation::dgauss(1, 1.0));
        assert_eq!(Activation::parse(&a.descriptor()).unwrap(), a);
        assert!(Activation::parse("swish").is_err());
        assert!(Activation::parse("dgauss:1.5").is_err());
    }

    #[test]
    fn ball_volumes() {
        assert_relative_eq!(unit_ball_volume(1), 2.0, max_relative = 1e-14);
        assert_relative_eq!(unit_ball_volume(2), PI, max_relative = 1e-14);
        assert_relative_eq!(unit_ball_volume(3), 4.0 * PI / 3.0, max_relative = 1e-14);
    }
}

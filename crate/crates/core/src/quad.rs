//! Panel quadrature on finite intervals.
//!
//! [`integrate`] refines the panel with the largest local error estimate
//! until the summed estimate drops below the requested tolerance, measured
//! relative to the integral of the absolute value of the integrand.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::num::NonZeroUsize;
use std::ops::{Add, Mul, Sub};
use std::sync::{Mutex, OnceLock};

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    GaussLegendre,
    Trapezoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rule: Rule,
    /// Nodes per panel.
    pub nodes: usize,
    pub rel_tol: f64,
    /// Absolute floor added to the relative tolerance.
    pub abs_tol: f64,
    pub initial_panels: usize,
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rule: Rule::GaussLegendre,
            nodes: 32,
            rel_tol: 1e-10,
            abs_tol: 0.0,
            initial_panels: 1,
            max_panels: 1 << 16,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tol(rel_tol: f64) -> Self {
        QuadratureSpec {
            rel_tol,
            ..Default::default()
        }
    }

    pub fn with_panels(mut self, initial_panels: usize) -> Self {
        self.initial_panels = initial_panels.max(1);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::Config(format!(
                "quadrature needs at least 2 nodes per panel, got {}",
                self.nodes
            )));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::Config(format!(
                "quadrature tolerance must be positive, got {}",
                self.rel_tol
            )));
        }
        if self.initial_panels == 0 || self.max_panels < self.initial_panels {
            return Err(Error::Config("invalid panel limits".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

impl<T: QuadValue> Estimate<T> {
    pub fn zero() -> Self {
        Estimate {
            value: T::default(),
            error: 0.0,
            evaluations: 0,
        }
    }
}

/// Values that can be summed by a quadrature rule.
pub trait QuadValue:
    Copy + Default + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(self) -> f64;
    fn is_finite_value(self) -> bool;
    fn describe(self) -> String;
}

impl QuadValue for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
    fn describe(self) -> String {
        format!("{self}")
    }
}

impl QuadValue for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn describe(self) -> String {
        format!("{self}")
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1], cached per order.
pub fn legendre_nodes(n: usize) -> &'static [(f64, f64)] {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static [(f64, f64)]>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|p| p.into_inner());
    guard.entry(n).or_insert_with(|| {
        let rule = GaussLegendre::new(NonZeroUsize::new(n.max(1)).unwrap());
        let pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
        Box::leak(pairs.into_boxed_slice())
    })
}

struct Panel<T> {
    lo: f64,
    hi: f64,
    left: T,
    right: T,
    abs: f64,
    err: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn apply_rule<T, F>(g: &F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<(T, f64)>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut acc = T::default();
    let mut abs = 0.0;
    let mut push = |x: f64, w: f64| -> Result<()> {
        let v = g(x);
        if !v.is_finite_value() {
            return Err(Error::Evaluation {
                location: x,
                value: v.describe(),
            });
        }
        acc = acc + v * w;
        abs += v.magnitude() * w.abs();
        Ok(())
    };
    match spec.rule {
        Rule::GaussLegendre => {
            for &(t, w) in legendre_nodes(spec.nodes) {
                push(mid + half * t, half * w)?;
            }
        }
        Rule::Trapezoid => {
            let k = spec.nodes - 1;
            let h = (hi - lo) / k as f64;
            for i in 0..=k {
                let w = if i == 0 || i == k { 0.5 * h } else { h };
                push(lo + h * i as f64, w)?;
            }
        }
    }
    Ok((acc, abs))
}

fn make_panel<T, F>(g: &F, lo: f64, hi: f64, whole: T, spec: &QuadratureSpec) -> Result<Panel<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let mid = 0.5 * (lo + hi);
    let (left, la) = apply_rule(g, lo, mid, spec)?;
    let (right, ra) = apply_rule(g, mid, hi, spec)?;
    let err = (left + right - whole).magnitude();
    Ok(Panel {
        lo,
        hi,
        left,
        right,
        abs: la + ra,
        err,
    })
}

/// Integrates `g` over `[lo, hi]` to `spec.rel_tol` relative to `∫|g|`.
pub fn integrate<T, F>(g: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    spec.validate()?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::Precondition(format!(
            "integration limits must be finite, got [{lo}, {hi}]"
        )));
    }
    if lo == hi {
        return Ok(Estimate::zero());
    }
    if lo > hi {
        let mut e = integrate(g, hi, lo, spec)?;
        e.value = e.value * -1.0;
        return Ok(e);
    }
    let per_rule = spec.nodes;
    let mut evaluations = 0usize;
    let mut heap = BinaryHeap::new();
    let n0 = spec.initial_panels;
    let width = (hi - lo) / n0 as f64;
    for i in 0..n0 {
        let a = lo + width * i as f64;
        let b = if i + 1 == n0 { hi } else { a + width };
        let (whole, _) = apply_rule(&g, a, b, spec)?;
        heap.push(make_panel(&g, a, b, whole, spec)?);
        evaluations += 3 * per_rule;
    }
    let sums = |heap: &BinaryHeap<Panel<T>>| {
        let (mut total, mut err, mut abs) = (T::default(), 0.0, 0.0);
        for p in heap.iter() {
            total = total + p.left + p.right;
            err += p.err;
            abs += p.abs;
        }
        (total, err, abs)
    };
    let (_, mut err, mut abs) = sums(&heap);
    loop {
        let tol = (spec.rel_tol * abs).max(spec.abs_tol);
        if err <= tol {
            let (total, e, a) = sums(&heap);
            err = e;
            abs = a;
            let tol = (spec.rel_tol * abs).max(spec.abs_tol);
            if err <= tol {
                return Ok(Estimate {
                    value: total,
                    error: err,
                    evaluations,
                });
            }
        }
        if heap.len() >= spec.max_panels {
            let (total, err, abs) = sums(&heap);
            return Err(Error::ToleranceNotMet {
                quantity: "integral".into(),
                achieved: total.magnitude(),
                estimate: err,
                tolerance: (spec.rel_tol * abs).max(spec.abs_tol),
            });
        }
        let worst = heap.pop().expect("non-empty panel heap");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            return Err(Error::ToleranceNotMet {
                quantity: "integral (panel width at machine precision)".into(),
                achieved: (worst.left + worst.right).magnitude(),
                estimate: err,
                tolerance: tol,
            });
        }
        let l = make_panel(&g, worst.lo, mid, worst.left, spec)?;
        let r = make_panel(&g, mid, worst.hi, worst.right, spec)?;
        err += l.err + r.err - worst.err;
        abs += l.abs + r.abs - worst.abs;
        heap.push(l);
        heap.push(r);
        evaluations += 4 * per_rule;
    }
}

/// Integrates over consecutive intervals delimited by sorted `breaks`.
pub fn integrate_pieces<T, F>(g: F, breaks: &[f64], spec: &QuadratureSpec) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let mut out = Estimate::zero();
    for w in breaks.windows(2) {
        let e = integrate(&g, w[0], w[1], spec)?;
        out.value = out.value + e.value;
        out.error += e.error;
        out.evaluations += e.evaluations;
    }
    Ok(out)
}

/// Composite Gauss–Legendre with a fixed number of equal panels. No checks.
pub fn gl_fixed<T, F>(g: F, lo: f64, hi: f64, panels: usize, nodes: usize) -> T
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let table = legendre_nodes(nodes);
    let panels = panels.max(1);
    let h = (hi - lo) / panels as f64;
    let mut acc = T::default();
    for k in 0..panels {
        let a = lo + h * k as f64;
        let mid = a + 0.5 * h;
        let half = 0.5 * h;
        let mut s = T::default();
        for &(t, w) in table {
            s = s + g(mid + half * t) * w;
        }
        acc = acc + s * half;
    }
    acc
}

/// Tensor-product node list for composite Gauss–Legendre on `[lo, hi]`.
pub fn gl_rule(lo: f64, hi: f64, panels: usize, nodes: usize) -> Vec<(f64, f64)> {
    let table = legendre_nodes(nodes);
    let panels = panels.max(1);
    let h = (hi - lo) / panels as f64;
    let mut out = Vec::with_capacity(panels * nodes);
    for k in 0..panels {
        let mid = lo + h * (k as f64 + 0.5);
        for &(t, w) in table {
            out.push((mid + 0.5 * h * t, 0.5 * h * w));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn integrates_identity() {
        let e = integrate(|x| x, 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert_abs_diff_eq!(e.value, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn gaussian_to_sqrt_pi() {
        let e = integrate(|x: f64| (-x * x).exp(), -8.0, 8.0, &QuadratureSpec::default()).unwrap();
        assert!((e.value - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn zero_integrand_has_zero_error() {
        let e = integrate(|_| 0.0, -3.0, 2.0, &QuadratureSpec::default()).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.error, 0.0);
    }

    #[test]
    fn nan_reports_location() {
        let err = integrate(
            |x: f64| if x > 0.5 { f64::NAN } else { x },
            0.0,
            1.0,
            &QuadratureSpec::default(),
        )
        .unwrap_err();
        match err {
            Error::Evaluation { location, .. } => assert!(location > 0.5),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let e = integrate(|x: f64| x * x, 1.0, 0.0, &QuadratureSpec::default()).unwrap();
        assert_abs_diff_eq!(e.value, -1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn trapezoid_rule_converges() {
        let spec = QuadratureSpec {
            rule: Rule::Trapezoid,
            nodes: 17,
            rel_tol: 1e-8,
            ..Default::default()
        };
        let e = integrate(|x: f64| x.sin(), 0.0, std::f64::consts::PI, &spec).unwrap();
        assert!((e.value - 2.0).abs() < 1e-7);
    }

    #[test]
    fn complex_integrand() {
        let e = integrate(
            |x: f64| Complex64::new(0.0, x).exp(),
            0.0,
            std::f64::consts::PI,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert!((e.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn kink_is_refined() {
        let e = integrate(|x: f64| x.abs(), -1.0, 2.0, &QuadratureSpec::default()).unwrap();
        assert!((e.value - 2.5).abs() < 1e-9);
    }

    #[test]
    fn impossible_tolerance_is_reported() {
        let spec = QuadratureSpec {
            max_panels: 4,
            rel_tol: 1e-14,
            ..Default::default()
        };
        let err = integrate(|x: f64| (1.0 / x).sin(), 1e-4, 1.0, &spec).unwrap_err();
        assert!(matches!(err, Error::ToleranceNotMet { .. }));
    }

    #[test]
    fn invalid_spec_rejected() {
        let spec = QuadratureSpec {
            nodes: 1,
            ..Default::default()
        };
        assert!(integrate(|x| x, 0.0, 1.0, &spec).is_err());
        let spec = QuadratureSpec {
            rel_tol: 0.0,
            ..Default::default()
        };
        assert!(integrate(|x| x, 0.0, 1.0, &spec).is_err());
    }

    #[test]
    fn fixed_rule_matches() {
        let v: f64 = gl_fixed(|x: f64| x.cos(), 0.0, 1.0, 3, 16);
        assert_abs_diff_eq!(v, 1f64.sin(), epsilon = 1e-15);
        let s: f64 = gl_rule(0.0, 2.0, 4, 8).iter().map(|&(x, w)| w * x * x).sum();
        assert_abs_diff_eq!(s, 8.0 / 3.0, epsilon = 1e-13);
    }
}

//! Library values against closed forms and brute-force sums written out here.

use std::f64::consts::PI;

use ridgebound::bounds::{compute_constants, rho_decay_constant, window_error_sq};
use ridgebound::experiments::unit_dataset;
use ridgebound::net::{train, ParameterDomain, TrainConfig};
use ridgebound::quad::QuadratureSpec;
use ridgebound::ridgelet::{
    admissibility_constant, box_energy, make_self_admissible, ridgelet_direct, ridgelet_fourier, spectrum_grid,
};
use ridgebound::{Activation, TargetFunction};

/// Composite Simpson rule with `n` (even) intervals.
fn simpson(g: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    let mut s = g(lo) + g(hi);
    for i in 1..n {
        s += g(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn gamma(x: f64) -> f64 {
    // Lanczos, g = 7
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let t = x + 7.5;
    let mut a = C[0];
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

fn brute_ridgelet(f: &TargetFunction, rho: &Activation, a: f64, b: f64) -> f64 {
    let (lo, hi) = f.effective_support();
    let n = 2 * (2000.0 * (1.0 + a.abs()) * (hi - lo)).ceil() as usize;
    simpson(|x| f.value(x) * rho.eval(a * x - b), lo, hi, n)
}

#[test]
fn transform_of_centered_bump_at_unit_scale() {
    let f = TargetFunction::gaussian(0.0, 1.0, 1.0);
    let rho = Activation::dgauss(1, 1.0);
    let spec = QuadratureSpec::with_tol(1e-12);
    let direct = ridgelet_direct(&f, &rho, 1.0, 0.0, &spec).unwrap().re;
    let oracle = brute_ridgelet(&f, &rho, 1.0, 0.0);
    assert!((direct - oracle).abs() < 1e-12, "{direct} vs {oracle}");
    // off the symmetry point the value is nonzero
    let direct = ridgelet_direct(&f, &rho, 1.0, 0.7, &spec).unwrap().re;
    let oracle = brute_ridgelet(&f, &rho, 1.0, 0.7);
    assert!(oracle.abs() > 0.1 && (direct - oracle).abs() < 1e-10, "{direct} vs {oracle}");
}

#[test]
fn both_transform_forms_match_brute_force() {
    let spec = QuadratureSpec::with_tol(1e-11);
    let targets = [TargetFunction::gaussian(0.5, 0.1, 1.0), TargetFunction::sim1(0.05), TargetFunction::chirp()];
    for f in &targets {
        for order in [1, 2] {
            let rho = make_self_admissible(order, 1.0, 1).unwrap().rho;
            for &(a, b) in &[(0.5, 0.2), (3.0, 1.4), (-7.0, -3.0), (25.0, 12.0), (-40.0, 3.0)] {
                let oracle = brute_ridgelet(f, &rho, a, b);
                let d = ridgelet_direct(f, &rho, a, b, &spec).unwrap();
                assert!((d.re - oracle).abs() < 1e-9, "{} direct at ({a}, {b}): {} vs {oracle}", f.descriptor(), d.re);
                if f.bandwidth().is_some() {
                    let w = ridgelet_fourier(f, &rho, a, b, &spec).unwrap();
                    assert!((w.re - oracle).abs() < 1e-9 && w.im.abs() < 1e-9, "{} fourier at ({a}, {b})", f.descriptor());
                }
            }
        }
    }
}

#[test]
fn self_admissibility_constant_closed_form() {
    // (2π)^{m−1} ∫ |ρ̂|² |ω|^{−m} with ρ̂ = (iω)^n τ √(2π) e^{−τ²ω²/2}
    let spec = QuadratureSpec::with_tol(1e-12);
    for &(n, tau) in &[(1u32, 1.0), (2, 1.0), (2, 0.6), (3, 1.7)] {
        let rho = Activation::dgauss(n, tau);
        let oracle = 2.0 * PI * tau.powi(2) * gamma(n as f64) / tau.powi(2 * n as i32);
        let k = admissibility_constant(&rho, &rho, 1, &spec).unwrap();
        assert!((k - oracle).abs() < 1e-10 * oracle, "n = {n}, τ = {tau}: {k} vs {oracle}");
    }
    let p = make_self_admissible(1, 1.0, 1).unwrap();
    let Activation::GaussianDerivative { scale, .. } = p.rho else { panic!() };
    assert!((scale - (2.0 * PI).sqrt().recip()).abs() < 1e-12);
}

#[test]
fn gaussian_against_second_derivative() {
    // σ̂ρ̂̄/|ω| = 2πτ ω e^{−(1+τ²)ω²/2} · (−ω)/|ω|, integrated in closed form
    let sigma = Activation::Gaussian { width: 1.0 };
    for tau in [0.5, 1.0, 2.0] {
        let k = admissibility_constant(&sigma, &Activation::dgauss(2, tau), 1, &QuadratureSpec::with_tol(1e-12)).unwrap();
        let oracle = -4.0 * PI * tau / (1.0 + tau * tau);
        assert!((k - oracle).abs() < 1e-10, "τ = {tau}: {k} vs {oracle}");
    }
}

#[test]
fn decay_constant_closed_form() {
    for &(n, tau, s) in &[(2u32, 1.0, 1.0), (2, 1.5, 1.0), (3, 0.7, 2.0), (2, 1.0, 2.0), (3, 1.0, 1.5)] {
        let p = 2.0 * s;
        let rho = make_self_admissible(n, tau, 1).unwrap().rho;
        let Activation::GaussianDerivative { scale, .. } = rho else { panic!() };
        let q = 2.0 * n as f64 - p;
        let oracle = (scale * scale * 2.0 * PI * tau * tau * gamma((q + 1.0) / 2.0) / tau.powf(q + 1.0) / (8.0 * PI * PI)).sqrt();
        let got = rho_decay_constant(&rho, s, 1).unwrap();
        assert!((got - oracle).abs() < 1e-9 * oracle, "n = {n}, τ = {tau}, s = {s}: {got} vs {oracle}");
    }
}

#[test]
fn sobolev_energy_of_bump() {
    // ∫ 2πA²σ² e^{−σ²ξ²} (1+ξ²) dξ
    let (sig, amp) = (0.1, 1.0);
    let f = TargetFunction::gaussian(0.5, sig, amp);
    let rho = make_self_admissible(2, 1.0, 1).unwrap().rho;
    let c = compute_constants(&f, &rho, 1.0, 1, &QuadratureSpec::with_tol(1e-10)).unwrap();
    let full = 2.0 * PI * amp * amp * sig * sig * (PI.sqrt() / sig + PI.sqrt() / (2.0 * sig.powi(3)));
    assert!((c.sobolev_norm.powi(2) - full).abs() < 1e-9 * full);
    assert!((c.c_f_s_plus.powi(2) - full / 2.0).abs() < 1e-9 * full);
    assert!((c.l2_sq - amp * amp * sig * PI.sqrt()).abs() < 1e-12);
    assert!((c.c0 - amp * sig * (2.0 * PI).sqrt() * rho.sup_norm()).abs() < 1e-12);
}

#[test]
fn box_energy_matches_nested_brute_force() {
    let f = TargetFunction::gaussian(0.5, 0.1, 1.0);
    let rho = make_self_admissible(1, 1.0, 1).unwrap().rho;
    let (lambda, kappa) = (2.0, 4.0);
    let got = box_energy(&f, &rho, lambda, kappa, &QuadratureSpec::with_tol(1e-10)).unwrap();
    let inner = |a: f64| simpson(|b| brute_ridgelet(&f, &rho, a, b).powi(2), -kappa / 2.0, kappa / 2.0, 160);
    let oracle = simpson(inner, -lambda, lambda, 80);
    assert!((got - oracle).abs() < 1e-7 * oracle, "{got} vs {oracle}");
}

#[test]
fn window_error_matches_dense_sum() {
    let f = TargetFunction::sim1(0.05);
    let data = unit_dataset(&f, 400, 400, 3).unwrap();
    let net = train(&data, &ParameterDomain::symmetric(5.0).unwrap(), &TrainConfig::new(60, 9), Activation::Sigmoid).unwrap();
    let (lo, hi) = f.effective_support();
    let oracle = simpson(|x| (f.value(x) - net.predict(x)).powi(2), lo, hi, 200_000);
    let got = window_error_sq(&f, &net).unwrap();
    assert!((got - oracle).abs() < 1e-6 * oracle.max(1e-12), "{got} vs {oracle}");
}

#[test]
fn windowed_sine_grid_matches_brute_force() {
    let f = TargetFunction::windowed_sine(2.0 * PI, 0.0, 1.0);
    let rho = make_self_admissible(1, 1.0, 1).unwrap().rho;
    let grid = spectrum_grid(&f, &rho, (-15.0, 15.0), (-10.0, 10.0), (31, 21), &QuadratureSpec::with_tol(1e-9)).unwrap();
    assert_eq!(grid.meta.failed_cells, 0);
    let mut worst: f64 = 0.0;
    for (i, &a) in grid.a.iter().enumerate() {
        for (j, &b) in grid.b.iter().enumerate() {
            let v = grid.get(i, j);
            worst = worst.max((v.re - brute_ridgelet(&f, &rho, a, b)).abs()).max(v.im.abs());
        }
    }
    assert!(worst < 1e-8, "worst cell error {worst}");
}

/// Range of `|a|` among the cells holding the top decile of magnitudes.
fn top_decile_band(a: &[f64], nb: usize, mags: &[f64]) -> (f64, f64) {
    let mut sorted = mags.to_vec();
    sorted.sort_by(|x, y| y.total_cmp(x));
    let cut = sorted[mags.len() / 10];
    let rows: Vec<f64> = mags
        .iter()
        .enumerate()
        .filter(|(_, &m)| m >= cut)
        .map(|(k, _)| a[k / nb].abs())
        .collect();
    (rows.iter().copied().fold(f64::INFINITY, f64::min), rows.iter().copied().fold(0.0, f64::max))
}

#[test]
fn windowed_sine_top_decile_band() {
    let f = TargetFunction::windowed_sine(2.0 * PI, 0.0, 1.0);
    let rho = make_self_admissible(1, 1.0, 1).unwrap().rho;
    let (na, nb) = (201, 201);
    let grid = spectrum_grid(&f, &rho, (-15.0, 15.0), (-10.0, 10.0), (na, nb), &QuadratureSpec::with_tol(1e-9)).unwrap();
    let brute: Vec<f64> = grid
        .a
        .iter()
        .flat_map(|&a| grid.b.iter().map(move |&b| (a, b)))
        .map(|(a, b)| brute_ridgelet(&f, &rho, a, b).abs())
        .collect();
    let mags = grid.magnitudes();
    let got = top_decile_band(&grid.a, nb, &mags);
    let oracle = top_decile_band(&grid.a, nb, &brute);
    assert_eq!(got, oracle);
    assert!(got.1 <= 12.0, "band {got:?}");
    // the largest values sit near the sine frequency
    let peak = (0..mags.len()).max_by(|&i, &j| mags[i].total_cmp(&mags[j])).unwrap();
    let a_peak = grid.a[peak / nb].abs();
    assert!((3.0..=12.0).contains(&a_peak), "peak at |a| = {a_peak}");
}

#[test]
fn grid_energy_of_bump_is_close_to_norm() {
    let f = TargetFunction::gaussian(0.5, 0.1, 1.0);
    let rho = make_self_admissible(1, 1.0, 1).unwrap().rho;
    let grid = spectrum_grid(&f, &rho, (-60.0, 60.0), (-40.0, 40.0), (121, 161), &QuadratureSpec::with_tol(1e-8)).unwrap();
    let l2 = f.l2_norm().unwrap().value.powi(2);
    assert!((grid.riemann_energy() - l2).abs() < 0.02 * l2, "{} vs {l2}", grid.riemann_energy());
}

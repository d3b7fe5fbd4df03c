use std::f64::consts::PI;

use proptest::prelude::*;

use ridgebound::activation::unit_ball_volume;
use ridgebound::bounds::{
    compute_constants, decay_envelope, lower_bound_closed_form, tail_bound_quadrature, theta, theta_from, BoundConstants,
    BoundMode,
};
use ridgebound::net::{fmt17, Dataset, Split};
use ridgebound::quad::QuadratureSpec;
use ridgebound::ridgelet::{admissibility_constant, make_self_admissible, ridgelet_fourier_fast};
use ridgebound::seeds;
use ridgebound::{Activation, TargetFunction};

fn bump_constants(s: f64) -> (TargetFunction, Activation, BoundConstants) {
    let f = TargetFunction::gaussian(0.5, 0.1, 1.0);
    let rho = make_self_admissible(2, 1.0, 1).unwrap().rho;
    let c = compute_constants(&f, &rho, s, 1, &QuadratureSpec::with_tol(1e-10)).unwrap();
    (f, rho, c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fmt17_round_trips(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        prop_assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn child_seeds_are_deterministic_and_distinct(root in any::<u64>(), i in 0u64..1000, j in 0u64..1000) {
        prop_assert_eq!(seeds::child(root, &[i, j]), seeds::child(root, &[i, j]));
        prop_assume!(i != j);
        prop_assert_ne!(seeds::child(root, &[i]), seeds::child(root, &[j]));
        prop_assert_ne!(seeds::child(root, &[i, j]), seeds::child(root, &[j, i]));
    }

    #[test]
    fn splits_partition_the_points(n in 2usize..300, frac in 0.0f64..1.0, seed in any::<u64>()) {
        let n_train = ((n as f64 * frac) as usize).max(1);
        let f = TargetFunction::sim1(0.05);
        let d = Dataset::equispaced(&f, n, n_train, seed).unwrap();
        let mut all = d.indices(Split::Train);
        prop_assert_eq!(all.len(), n_train);
        all.extend(d.indices(Split::Test));
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn ball_and_sphere_are_consistent(m in 1usize..12) {
        // |S^{m−1}| = m V_m, and V_m = 2π/m · V_{m−2}
        let sphere = 2.0 * PI.powf(m as f64 / 2.0) / libm::tgamma(m as f64 / 2.0);
        prop_assert!((m as f64 * unit_ball_volume(m) - sphere).abs() < 1e-12 * sphere);
        if m > 2 {
            let rec = 2.0 * PI / m as f64 * unit_ball_volume(m - 2);
            prop_assert!((unit_ball_volume(m) - rec).abs() < 1e-12 * rec);
        }
    }

    #[test]
    fn admissibility_is_bilinear_in_scale(k1 in 0.1f64..5.0, k2 in 0.1f64..5.0, tau in 0.5f64..2.0) {
        let spec = QuadratureSpec::with_tol(1e-12);
        let base = Activation::dgauss(2, tau);
        let k = admissibility_constant(&base, &base, 1, &spec).unwrap();
        let scaled = admissibility_constant(&base.scaled(k1).unwrap(), &base.scaled(k2).unwrap(), 1, &spec).unwrap();
        prop_assert!((scaled - k1 * k2 * k).abs() < 1e-10 * (k1 * k2 * k).abs());
    }

    #[test]
    fn theta_modes_are_reciprocal(c0 in 1e-3f64..10.0, ci in 1e-3f64..10.0, s in 0.5f64..3.0) {
        let a = theta_from(c0, ci, s, 1, BoundMode::AsPrinted).unwrap();
        let b = theta_from(c0, ci, s, 1, BoundMode::Corrected).unwrap();
        prop_assert!((a * b - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn envelope_dominates_transform(r in 1e-3f64..50.0, neg in any::<bool>(), t in -1.0f64..1.0, s in prop::sample::select(vec![1.0, 2.0])) {
        let (f, rho, c) = bump_constants(s);
        let u = if neg { -1.0 } else { 1.0 };
        let a = r * u;
        let b = 0.5 * a + t * (4.0 + r * 0.3);
        let v = ridgelet_fourier_fast(&f, &rho, a, b).unwrap().norm();
        prop_assert!(v <= decay_envelope(&c, r, u, BoundMode::Corrected) * (1.0 + 1e-6), "r = {r}, b = {b}: {v}");
    }

    #[test]
    fn corrected_closed_form_is_continuous_and_monotone(l1 in 0.05f64..80.0, l2 in 0.05f64..80.0, s in prop::sample::select(vec![1.0, 2.0])) {
        let (_, _, c) = bump_constants(s);
        let mode = BoundMode::Corrected;
        let th = theta(&c, mode).unwrap();
        let below = lower_bound_closed_form(&c, th * (1.0 - 1e-12), 2.0 * th, mode).unwrap();
        let above = lower_bound_closed_form(&c, th * (1.0 + 1e-12), 2.0 * th, mode).unwrap();
        prop_assert!((below - above).abs() < 1e-9 * c.l2_sq);
        let (lo, hi) = if l1 < l2 { (l1, l2) } else { (l2, l1) };
        let v_lo = lower_bound_closed_form(&c, lo, 2.0 * lo, mode).unwrap();
        let v_hi = lower_bound_closed_form(&c, hi, 2.0 * hi, mode).unwrap();
        prop_assert!(v_hi <= v_lo + 1e-12 * c.l2_sq);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn tail_is_monotone_and_dominates_closed_form(l in 0.2f64..15.0, grow in 1.1f64..3.0, k in 0.5f64..6.0) {
        let (f, rho, c) = bump_constants(1.0);
        let spec = QuadratureSpec::with_tol(1e-9);
        let t = tail_bound_quadrature(&f, &rho, l, k, &spec).unwrap();
        let t_l = tail_bound_quadrature(&f, &rho, l * grow, k, &spec).unwrap();
        let t_k = tail_bound_quadrature(&f, &rho, l, k * grow, &spec).unwrap();
        let tol = 1e-9 * c.l2_sq;
        prop_assert!(t_l <= t + tol && t_k <= t + tol, "{t} {t_l} {t_k}");
        let closed = lower_bound_closed_form(&c, l, k, BoundMode::Corrected).unwrap();
        prop_assert!(closed <= t + 1e-3 * c.l2_sq, "closed {closed} tail {t}");
    }
}

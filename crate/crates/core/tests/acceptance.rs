//! One PASS/FAIL line per acceptance criterion. Run with `--nocapture` to see them.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ridgebound::bounds::{compute_constants, decay_envelope, lower_bound_closed_form, tail_bound_quadrature, theta, BoundMode};
use ridgebound::experiments::fig1::Fig1;
use ridgebound::experiments::sim1::{Sim1, Sim1Config};
use ridgebound::experiments::sim2::{Sim2, Sim2Config};
use ridgebound::experiments::sim3::{Sim3, Sim3Config};
use ridgebound::experiments::sweep::{Sweep, SweepConfig};
use ridgebound::experiments::{Experiment, Manifest};
use ridgebound::net::relative_error;
use ridgebound::quad::QuadratureSpec;
use ridgebound::ridgelet::{
    admissibility_constant, homogeneous_reconstruct, make_self_admissible, plancherel, reconstruct_many, ridgelet_direct,
    AdmissiblePair, ReconstructionOptions,
};
use ridgebound::{Activation, GaussianBump, TargetFunction};

const PLANCHEREL_TOL: f64 = 1e-3;
const PLANCHEREL_SECONDS: f64 = 60.0;
const RECONSTRUCTION_TOL: f64 = 1e-2;
const RECONSTRUCTION_SECONDS: f64 = 300.0;
const HOMOGENEOUS_TOL: f64 = 1e-3;
const HOMOGENEOUS_SECONDS: f64 = 60.0;
const ADMISSIBLE_TOL: f64 = 1e-8;
const SCALE_TOL: f64 = 1e-10;
const ENVELOPE_SLACK: f64 = 1e-6;
const ENVELOPE_SAMPLES: usize = 1000;
const BRANCH_TOL: f64 = 1e-9;
const CLOSED_FORM_SLACK: f64 = 1e-3;
const TABLE_SECONDS: f64 = 1200.0;
const SIM_SECONDS: f64 = 600.0;
const FAIL_THRESHOLD: f64 = 0.3;
const FIT_THRESHOLD: f64 = 1e-2;
const PRUNE_TOL: f64 = 0.05;
const GREEN: f64 = 1e-5;
/// Residuals of minimum-norm fits below this are roundoff and carry no ordering.
const TABLE_FLOOR: f64 = 1e-10;
const EMPIRICAL_SLACK: f64 = 1e-3;

struct Report {
    lines: Vec<(usize, bool, String)>,
}

impl Report {
    fn record(&mut self, id: usize, pass: bool, detail: String) {
        // straight to the handle so the line shows without --nocapture
        let line = format!("criterion {id:>2}: {} {detail}\n", if pass { "PASS" } else { "FAIL" });
        let mut out = std::io::stdout().lock();
        let _ = out.write_all(line.as_bytes()).and_then(|_| out.flush());
        self.lines.push((id, pass, detail));
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed().as_secs_f64())
}

fn plancherel_identity(r: &mut Report) {
    let rho = make_self_admissible(1, 1.0, 1).unwrap().rho;
    let mut ok = true;
    let mut detail = Vec::new();
    for f in [TargetFunction::gaussian(0.5, 0.1, 1.0), TargetFunction::sim1(0.05)] {
        let (rep, secs) = timed(|| plancherel(&f, &rho, &QuadratureSpec::with_tol(1e-8)));
        let gap = rep.map(|p| p.gap).unwrap_or(f64::NAN);
        ok &= gap <= PLANCHEREL_TOL && secs <= PLANCHEREL_SECONDS;
        detail.push(format!("{}: gap {gap:.2e} in {secs:.1}s", f.descriptor()));
    }
    r.record(1, ok, detail.join("; "));
}

fn reconstruction(r: &mut Report) {
    let f = TargetFunction::gaussian(0.5, 0.1, 1.0);
    let (lo, hi) = f.effective_support();
    let xs: Vec<f64> = (0..201).map(|i| lo + (hi - lo) * i as f64 / 200.0).collect();
    let truth: Vec<f64> = xs.iter().map(|&x| f.value(x)).collect();
    let mut detail = Vec::new();
    let (errs, secs) = timed(|| {
        [1.0, 2.0]
            .iter()
            .map(|&w| {
                let pair = AdmissiblePair::normalized(Activation::Gaussian { width: 1.0 }, Activation::dgauss(2, w)).unwrap();
                let ys = reconstruct_many(&f, &pair, &xs, &ReconstructionOptions::default()).unwrap();
                (pair.rho.descriptor(), relative_error(&ys, &truth).unwrap())
            })
            .collect::<Vec<_>>()
    });
    let mut ok = secs <= RECONSTRUCTION_SECONDS;
    for (rho, e) in &errs {
        ok &= *e <= RECONSTRUCTION_TOL;
        detail.push(format!("rho {rho}: {e:.2e}"));
    }
    r.record(2, ok, format!("{} in {secs:.1}s", detail.join(", ")));
}

fn homogeneous(r: &mut Report) {
    let spec = QuadratureSpec::with_tol(1e-10);
    let mixes = [
        TargetFunction::mix(vec![GaussianBump::new(-0.5, 0.3, 1.0), GaussianBump::new(0.7, 0.2, -0.6)]),
        TargetFunction::sim1(0.1),
    ];
    let (worst, secs) = timed(|| {
        mixes
            .iter()
            .map(|f| {
                (0..=400)
                    .map(|i| {
                        let x = -2.0 + i as f64 * 0.01;
                        (homogeneous_reconstruct(f, 1, 1, x, &spec).unwrap() - f.value(x)).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .collect::<Vec<_>>()
    });
    let ok = worst.iter().all(|&w| w <= HOMOGENEOUS_TOL) && secs <= HOMOGENEOUS_SECONDS;
    r.record(3, ok, format!("sup errors {:.2e}, {:.2e} in {secs:.1}s", worst[0], worst[1]));
}

fn admissibility(r: &mut Report) {
    let spec = QuadratureSpec::with_tol(1e-12);
    let p = make_self_admissible(1, 1.0, 1).unwrap();
    let k = admissibility_constant(&p.rho, &p.rho, 1, &spec).unwrap();
    let Activation::GaussianDerivative { scale, .. } = p.rho else { unreachable!() };
    let oracle = (2.0 * PI).sqrt().recip();
    let g = Activation::Gaussian { width: 1.0 };
    let rejected = matches!(admissibility_constant(&g, &g, 1, &spec), Err(ridgebound::Error::NotAdmissible(_)));
    let ok = (k - 1.0).abs() <= ADMISSIBLE_TOL && (scale - oracle).abs() <= SCALE_TOL && rejected;
    r.record(4, ok, format!("K - 1 = {:.1e}, C - (2pi)^-1/2 = {:.1e}, gaussian rejected {rejected}", k - 1.0, scale - oracle));
}

fn envelope(r: &mut Report) {
    let f = TargetFunction::gaussian(0.5, 0.1, 1.0);
    let rho = make_self_admissible(2, 1.0, 1).unwrap().rho;
    let spec = QuadratureSpec::with_tol(1e-10);
    let mut ok = true;
    let mut detail = Vec::new();
    for s in [1.0, 2.0] {
        let c = compute_constants(&f, &rho, s, 1, &spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4 + s as u64);
        let (mut worst, mut printed_violations) = (0.0f64, 0);
        for _ in 0..ENVELOPE_SAMPLES {
            let rr: f64 = 50.0 * (1.0 - rng.random::<f64>());
            let u = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let b = 0.5 * rr * u + rng.random_range(-1.0..1.0) * (4.0 + 0.3 * rr);
            let v = ridgelet_direct(&f, &rho, rr * u, b, &spec).unwrap().norm();
            worst = worst.max(v / decay_envelope(&c, rr, u, BoundMode::Corrected));
            if v > decay_envelope(&c, rr, u, BoundMode::AsPrinted) * (1.0 + ENVELOPE_SLACK) {
                printed_violations += 1;
            }
        }
        ok &= worst <= 1.0 + ENVELOPE_SLACK;
        detail.push(format!("s={s}: max |R|/envelope {worst:.4} (as printed: {printed_violations} violations)"));
    }
    r.record(5, ok, detail.join("; "));
}

fn bound_coherence(r: &mut Report) {
    let f = TargetFunction::sim1(0.05);
    let rho = make_self_admissible(2, 1.0, 1).unwrap().rho;
    let spec = QuadratureSpec::with_tol(1e-9);
    let c = compute_constants(&f, &rho, 1.0, 1, &spec).unwrap();
    let mode = BoundMode::Corrected;
    let th = theta(&c, mode).unwrap();
    let flat = c.l2_sq - c.c0 * c.c0 * c.v_m * 2.0 * th * th;
    let ci = c.c_inf_for(mode);
    let decay = c.l2_sq - ci * ci * 2.0 * th / 2.0 * (3.0 * th.powi(-2) - th.powi(-2));
    let branch_gap = (flat - decay).abs() / flat.abs().max(c.l2_sq);

    let lambdas: Vec<f64> = (0..20).map(|i| 0.1 * 500f64.powf(i as f64 / 19.0)).collect();
    let closed: Vec<f64> = lambdas.iter().map(|&l| lower_bound_closed_form(&c, l, 2.0 * l, mode).unwrap()).collect();
    let tails: Vec<f64> = lambdas.iter().map(|&l| tail_bound_quadrature(&f, &rho, l, 2.0 * l, &spec).unwrap()).collect();
    let kappas = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
    let tails_k: Vec<f64> = kappas.iter().map(|&k| tail_bound_quadrature(&f, &rho, 5.0, k, &spec).unwrap()).collect();
    let tiny = 1e-12 * c.l2_sq;
    let closed_mono = closed.windows(2).all(|w| w[1] <= w[0] + tiny);
    let dominated = closed.iter().zip(&tails).all(|(c0, t)| *c0 <= t + CLOSED_FORM_SLACK * c.l2_sq);
    let tail_mono = tails.windows(2).all(|w| w[1] <= w[0] + tiny) && tails_k.windows(2).all(|w| w[1] <= w[0] + tiny);
    let ok = branch_gap <= BRANCH_TOL && closed_mono && dominated && tail_mono;
    r.record(
        6,
        ok,
        format!(
            "theta {th:.4}, branch gap {branch_gap:.1e}, closed form monotone {closed_mono}, below tail {dominated}, tail monotone {tail_mono}"
        ),
    );
}

fn table(r: &mut Report, out: &Path) {
    let config = Sim2Config::desk();
    let (m, secs) = timed(|| Sim2::run(&config, out).unwrap());
    let cell = |l: f64, s: f64| m.aggregate[&format!("lambda{l}_sigma{s}")];
    let a = cell(0.1, 0.01).mean;
    let b = cell(0.1, 0.5).mean;
    let green = [
        (5.0, 0.5),
        (10.0, 0.1),
        (10.0, 0.5),
        (50.0, 0.05),
        (50.0, 0.1),
        (50.0, 0.5),
        (100.0, 0.01),
        (100.0, 0.05),
        (100.0, 0.1),
        (100.0, 0.5),
        (200.0, 0.01),
        (200.0, 0.05),
        (200.0, 0.1),
        (200.0, 0.5),
    ];
    let worst_green = green.iter().map(|&(l, s)| cell(l, s).mean).fold(0.0, f64::max);
    let (mut monotone, mut floor_pairs) = (true, 0);
    for &s in &config.sigmas {
        for w in config.lambdas.windows(2) {
            let (c0, c1) = (cell(w[0], s), cell(w[1], s));
            let slack = 2.0 * (c0.stderr.powi(2) + c1.stderr.powi(2)).sqrt();
            if c1.mean > c0.mean + slack {
                floor_pairs += 1;
                monotone &= c1.mean <= c0.mean + slack + TABLE_FLOOR;
            }
        }
    }
    let first_green: Vec<f64> = config
        .sigmas
        .iter()
        .map(|&s| config.lambdas.iter().copied().find(|&l| cell(l, s).mean < GREEN).unwrap_or(f64::INFINITY))
        .collect();
    let nested = first_green.windows(2).all(|w| w[1] <= w[0]);
    let ok = (a - 0.95).abs() <= 0.05 && b <= 0.01 && worst_green < GREEN && monotone && nested && secs <= TABLE_SECONDS;
    r.record(
        7,
        ok,
        format!(
            "E(0.1,0.01) = {a:.4}, E(0.1,0.5) = {b:.2e}, worst green {worst_green:.2e}, monotone {monotone} \
             ({floor_pairs} rises below the {TABLE_FLOOR:e} floor), first green lambda {first_green:?}, {secs:.0}s"
        ),
    );
}

fn simulations(r: &mut Report, out: &Path) {
    let ((m1, m3), secs) = timed(|| {
        (
            Sim1::run(&Sim1Config::default(), &out.join("sim1")).unwrap(),
            Sim3::run(&Sim3Config::default(), &out.join("sim3")).unwrap(),
        )
    });
    let narrow_f = m1.metric("run2_lambda1_width10000", "train_error").unwrap();
    let wide_f = m1.metric("run3_lambda20_width200", "train_error").unwrap();
    let narrow_g = m3.metric("narrow", "train_error").unwrap();
    let wide_g = m3.metric("wide", "train_error").unwrap();
    let prune = m3.metric("prune", "relative_difference").unwrap();
    let ok = narrow_f > FAIL_THRESHOLD
        && narrow_g > FAIL_THRESHOLD
        && wide_f < FIT_THRESHOLD
        && wide_g < FIT_THRESHOLD
        && prune < PRUNE_TOL
        && secs <= SIM_SECONDS;
    r.record(
        8,
        ok,
        format!(
            "f: {narrow_f:.3} / {wide_f:.1e}, g: {narrow_g:.3} / {wide_g:.1e}, prune {prune:.3}, {secs:.0}s"
        ),
    );
}

fn sweep(r: &mut Report, out: &Path) {
    let m = Sweep::run(&SweepConfig::desk(), out).unwrap();
    let mut rdr = csv::Reader::from_path(out.join("bound_sweep.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (ie, it) = (col("empirical_error"), col("quadrature_tail"));
    let mut ok = true;
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let (e, t): (f64, f64) = (rec[ie].parse().unwrap(), rec[it].parse().unwrap());
        ok &= e >= t - EMPIRICAL_SLACK;
        rows += 1;
    }
    let violations = m.aggregate["violation"].mean * m.aggregate["violation"].n as f64;
    r.record(9, ok, format!("{rows} rows, rows flagged at 1e-3 ||f||^2: {violations}"));
}

fn determinism(r: &mut Report, runs: &[&Path], scratch: &Path) {
    let mut ok = true;
    let mut files = 0;
    for (k, dir) in runs.iter().enumerate() {
        let m = Manifest::read(dir.join("manifest.json")).unwrap();
        let again = scratch.join(format!("rerun{k}"));
        match m.experiment.as_str() {
            "sim1" => drop(Sim1::run(&m.config_as().unwrap(), &again).unwrap()),
            "sim3" => drop(Sim3::run(&m.config_as().unwrap(), &again).unwrap()),
            "fig1" => drop(Fig1::run(&m.config_as().unwrap(), &again).unwrap()),
            other => panic!("no rerun for {other}"),
        }
        for name in m.outputs.iter().filter(|n| n.ends_with(".csv")) {
            ok &= std::fs::read(dir.join(name)).unwrap() == std::fs::read(again.join(name)).unwrap();
            files += 1;
        }
    }
    r.record(10, ok, format!("{files} CSV files compared byte for byte"));
}

#[test]
fn acceptance() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let mut r = Report { lines: Vec::new() };
    plancherel_identity(&mut r);
    reconstruction(&mut r);
    homogeneous(&mut r);
    admissibility(&mut r);
    envelope(&mut r);
    bound_coherence(&mut r);
    table(&mut r, &root.join("sim2"));
    simulations(&mut r, root);
    sweep(&mut r, &root.join("sweep"));
    determinism(&mut r, &[&root.join("sim1"), &root.join("sim3")], root);
    let failed: Vec<usize> = r.lines.iter().filter(|l| !l.1).map(|l| l.0).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

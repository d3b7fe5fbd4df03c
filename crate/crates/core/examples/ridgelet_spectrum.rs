//! The ridgelet transform of a Gaussian bump, direct and Fourier forms side by side,
//! and where the spectrum of a windowed sine concentrates.

use ridgebound::quad::QuadratureSpec;
use ridgebound::ridgelet::{make_self_admissible, ridgelet_direct, ridgelet_fourier, spectrum_grid};
use ridgebound::TargetFunction;

fn main() -> ridgebound::Result<()> {
    let f = TargetFunction::gaussian(0.5, 0.1, 1.0);
    let rho = make_self_admissible(1, 1.0, 1)?.rho;
    let spec = QuadratureSpec::with_tol(1e-10);
    for (a, b) in [(2.0, 0.0), (-5.0, -1.0), (10.0, 3.0)] {
        let d = ridgelet_direct(&f, &rho, a, b, &spec)?;
        let w = ridgelet_fourier(&f, &rho, a, b, &spec)?;
        println!("R[f]({a}, {b}): direct {:.12e} fourier {:.12e}", d.re, w.re);
    }
    let grid = spectrum_grid(&f, &rho, (-40.0, 40.0), (-40.0, 40.0), (81, 81), &QuadratureSpec::with_tol(1e-8))?;
    println!(
        "grid energy {:.6} against ||f||^2 = {:.6}",
        grid.riemann_energy(),
        f.l2_norm()?.value.powi(2)
    );

    let sine = TargetFunction::windowed_sine(2.0 * std::f64::consts::PI, 0.0, 1.0);
    let grid = spectrum_grid(&sine, &rho, (-15.0, 15.0), (-10.0, 10.0), (61, 41), &QuadratureSpec::with_tol(1e-9))?;
    let mags = grid.magnitudes();
    let mut sorted = mags.clone();
    sorted.sort_by(|x, y| y.total_cmp(x));
    let cut = sorted[mags.len() / 10];
    let top: Vec<f64> = (0..mags.len()).filter(|&k| mags[k] >= cut).map(|k| grid.a[k / grid.b.len()].abs()).collect();
    println!(
        "windowed sine: top decile of |R| at {:.2} <= |a| <= {:.2}",
        top.iter().copied().fold(f64::INFINITY, f64::min),
        top.iter().copied().fold(0.0, f64::max)
    );
    Ok(())
}

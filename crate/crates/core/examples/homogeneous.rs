//! Reconstruction of Gaussian mixtures from ReLU ridge functions.

use ridgebound::quad::QuadratureSpec;
use ridgebound::ridgelet::homogeneous_reconstruct;
use ridgebound::{GaussianBump, TargetFunction};

fn main() -> ridgebound::Result<()> {
    let spec = QuadratureSpec::with_tol(1e-10);
    let mixes = [
        TargetFunction::mix(vec![GaussianBump::new(-0.5, 0.3, 1.0), GaussianBump::new(0.7, 0.2, -0.6)]),
        TargetFunction::sim1(0.1),
    ];
    for f in &mixes {
        let mut worst: f64 = 0.0;
        for i in 0..=400 {
            let x = -2.0 + i as f64 * 0.01;
            worst = worst.max((homogeneous_reconstruct(f, 1, 1, x, &spec)? - f.value(x)).abs());
        }
        println!("{}: sup error on [-2, 2] = {worst:.2e}", f.descriptor());
    }
    Ok(())
}

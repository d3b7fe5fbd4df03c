//! Synthesises the ridgelet transform back into the target for two admissible pairs.

use ridgebound::ridgelet::{reconstruct_many, AdmissiblePair, ReconstructionOptions};
use ridgebound::{Activation, TargetFunction};

fn main() -> ridgebound::Result<()> {
    let f = TargetFunction::gaussian(0.5, 0.1, 1.0);
    let (lo, hi) = f.effective_support();
    let xs: Vec<f64> = (0..=40).map(|i| lo + (hi - lo) * i as f64 / 40.0).collect();
    let truth: Vec<f64> = xs.iter().map(|&x| f.value(x)).collect();
    for width in [1.0, 2.0] {
        let pair = AdmissiblePair::normalized(Activation::Gaussian { width: 1.0 }, Activation::dgauss(2, width))?;
        let ys = reconstruct_many(&f, &pair, &xs, &ReconstructionOptions::default())?;
        println!("rho = {}: relative error {:.3e}", pair.rho.descriptor(), ridgebound::net::relative_error(&ys, &truth)?);
    }
    Ok(())
}

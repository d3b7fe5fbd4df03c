//! Admissibility constants, self-admissible normalisation and a rejected pair.

use ridgebound::quad::QuadratureSpec;
use ridgebound::ridgelet::{admissibility_constant, make_self_admissible, normalize_against, self_admissible_scale};
use ridgebound::Activation;

fn main() -> ridgebound::Result<()> {
    let spec = QuadratureSpec::with_tol(1e-12);
    let c = self_admissible_scale(1, 1.0, 1)?;
    let p = make_self_admissible(1, 1.0, 1)?;
    println!("C = {c:.15} (1/sqrt(2 pi) = {:.15})", (2.0 * std::f64::consts::PI).sqrt().recip());
    println!("K(rho, rho) = {:.12}", admissibility_constant(&p.rho, &p.rho, 1, &spec)?);

    let sigma = Activation::Gaussian { width: 1.0 };
    let rho = normalize_against(&sigma, &Activation::dgauss(2, 1.0), 1)?;
    println!("{} against {}: K = {:.12}", rho.descriptor(), sigma.descriptor(), admissibility_constant(&sigma, &rho, 1, &spec)?);

    match admissibility_constant(&sigma, &sigma, 1, &spec) {
        Err(e) => println!("plain Gaussian: {e}"),
        Ok(k) => println!("plain Gaussian unexpectedly gave {k}"),
    }
    Ok(())
}

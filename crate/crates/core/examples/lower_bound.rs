//! Closed-form and spectral-tail lower bounds for networks restricted to a parameter box.

use ridgebound::bounds::{compute_constants, lower_bound_closed_form, tail_bound_quadrature, theta, BoundMode};
use ridgebound::quad::QuadratureSpec;
use ridgebound::ridgelet::make_self_admissible;
use ridgebound::TargetFunction;

fn main() -> ridgebound::Result<()> {
    let f = TargetFunction::gaussian(0.5, 0.1, 1.0);
    let rho = make_self_admissible(2, 1.0, 1)?.rho;
    let spec = QuadratureSpec::with_tol(1e-9);
    let c = compute_constants(&f, &rho, 1.0, 1, &spec)?;
    println!("C0 = {:.6e}  C_rho,s = {:.6e}  ||f||^2 = {:.6e}", c.c0, c.c_rho_s, c.l2_sq);
    for mode in [BoundMode::Corrected, BoundMode::AsPrinted] {
        println!("{}: theta = {:.4}", mode.name(), theta(&c, mode)?);
    }
    for lambda in [1.0, 5.0, 20.0, 60.0] {
        let closed = lower_bound_closed_form(&c, lambda, 2.0 * lambda, BoundMode::Corrected)?;
        let tail = tail_bound_quadrature(&f, &rho, lambda, 2.0 * lambda, &spec)?;
        println!("lambda {lambda:>4}: closed form {closed:.6e}  spectral tail {tail:.6e}");
    }
    Ok(())
}

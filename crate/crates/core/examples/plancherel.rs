//! The ridgelet transform preserves the L2 norm for a self-admissible rho.

use ridgebound::quad::QuadratureSpec;
use ridgebound::ridgelet::{make_self_admissible, plancherel};
use ridgebound::TargetFunction;

fn main() -> ridgebound::Result<()> {
    let rho = make_self_admissible(1, 1.0, 1)?.rho;
    for f in [TargetFunction::gaussian(0.5, 0.1, 1.0), TargetFunction::sim1(0.05)] {
        let r = plancherel(&f, &rho, &QuadratureSpec::with_tol(1e-8))?;
        println!(
            "{}: ||f|| = {:.10} ||R[f]|| = {:.10} gap {:.2e} (box |a| <= {:.1})",
            f.descriptor(),
            r.target_norm,
            r.transform_norm,
            r.gap,
            r.box_a
        );
    }
    Ok(())
}

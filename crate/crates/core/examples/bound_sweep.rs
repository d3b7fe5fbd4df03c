//! The bound sweep on a short grid: spectral tail, closed form and the error of trained nets.

use ridgebound::experiments::sweep::{Sweep, SweepConfig};
use ridgebound::experiments::Experiment;

fn main() -> ridgebound::Result<()> {
    let out = std::env::temp_dir().join("ridgebound-sweep");
    let config = SweepConfig {
        lambdas: vec![0.5, 2.0, 10.0],
        trials: 1,
        ..SweepConfig::desk()
    };
    Sweep::run(&config, &out)?;
    print!("{}", std::fs::read_to_string(out.join("bound_sweep.csv"))?);
    Ok(())
}

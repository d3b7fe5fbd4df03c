//! Runs the two-bump study into a fresh directory and prints its error table.

use ridgebound::experiments::sim1::{Sim1, Sim1Config};
use ridgebound::experiments::Experiment;

fn main() -> ridgebound::Result<()> {
    let out = std::env::temp_dir().join("ridgebound-sim1");
    let m = Sim1::run(&Sim1Config::default(), &out)?;
    for t in &m.trials {
        println!("{:<28} train {:.3e} test {:.3e}", t.id, t.metrics["train_error"], t.metrics["test_error"]);
    }
    println!("outputs in {}", out.display());
    Ok(())
}

//! The chirp target: narrow and wide ranges, the slope of g and pruning of small parameters.

use ridgebound::experiments::sim3::{Sim3, Sim3Config};
use ridgebound::experiments::Experiment;

fn main() -> ridgebound::Result<()> {
    let out = std::env::temp_dir().join("ridgebound-sim3");
    let m = Sim3::run(&Sim3Config::default(), &out)?;
    for t in &m.trials {
        println!("[{}]", t.id);
        for (k, v) in &t.metrics {
            println!("  {k} = {v:.4e}");
        }
    }
    Ok(())
}

//! Reruns an experiment from its own manifest and compares the CSV outputs byte for byte.

use ridgebound::experiments::sim3::{Sim3, Sim3Config};
use ridgebound::experiments::{Experiment, Manifest};

fn main() -> ridgebound::Result<()> {
    let base = std::env::temp_dir().join("ridgebound-rerun");
    let (first, second) = (base.join("first"), base.join("second"));
    let m = Sim3::run(&Sim3Config { plot: false, ..Sim3Config::default() }, &first)?;
    let config: Sim3Config = Manifest::read(first.join("manifest.json"))?.config_as()?;
    Sim3::run(&config, &second)?;
    for name in m.outputs.iter().filter(|n| n.ends_with(".csv")) {
        let same = std::fs::read(first.join(name))? == std::fs::read(second.join(name))?;
        println!("{name}: {}", if same { "identical" } else { "DIFFERENT" });
    }
    Ok(())
}

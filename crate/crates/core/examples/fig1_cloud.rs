//! Gradient-descent parameter cloud next to the ridgelet spectrum of sin(2 pi x), with a few nets.

use ridgebound::experiments::fig1::{Fig1, Fig1Config};
use ridgebound::experiments::Experiment;

fn main() -> ridgebound::Result<()> {
    let out = std::env::temp_dir().join("ridgebound-fig1");
    let config = Fig1Config {
        nets: 10,
        resolution: (61, 81),
        ..Fig1Config::desk()
    };
    let m = Fig1::run(&config, &out)?;
    println!("riemann energy {:.4}", m.metric("spectrum", "riemann_energy").unwrap_or(f64::NAN));
    println!("scatter.svg and spectrum.svg in {}", out.display());
    Ok(())
}

//! Fits random sigmoid networks with a narrow and a wide weight range to the two-bump target.

use ridgebound::experiments::unit_dataset;
use ridgebound::net::{train, ParameterDomain, Split, TrainConfig};
use ridgebound::{Activation, TargetFunction};

fn main() -> ridgebound::Result<()> {
    let f = TargetFunction::sim1(0.05);
    let data = unit_dataset(&f, 1000, 500, 7)?;
    for (lambda, width) in [(1.0, 500), (20.0, 200)] {
        let net = train(&data, &ParameterDomain::symmetric(lambda)?, &TrainConfig::new(width, 11), Activation::Sigmoid)?;
        println!(
            "lambda {lambda:>5} width {width:>4}: train {:.3e} test {:.3e}",
            net.relative_error(&data, Split::Train)?,
            net.relative_error(&data, Split::Test)?
        );
    }
    Ok(())
}

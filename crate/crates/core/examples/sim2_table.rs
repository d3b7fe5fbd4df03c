//! A reduced version of the weight-range by target-width table.

use ridgebound::experiments::sim2::{run_table, Sim2Config};

fn main() -> ridgebound::Result<()> {
    let config = Sim2Config {
        lambdas: vec![0.1, 1.0, 10.0, 100.0],
        width: 500,
        trials: 3,
        ..Sim2Config::desk()
    };
    let table = run_table(&config)?;
    print!("{:>8}", "lambda");
    for s in &table.sigmas {
        print!("{:>12}", format!("s={s}"));
    }
    println!();
    for (l, row) in table.lambdas.iter().zip(&table.cells) {
        print!("{l:>8}");
        for c in row {
            print!("{:>12.2e}", c.mean);
        }
        println!();
    }
    Ok(())
}

//! Sweeps the class-K gain of the extended filter and tabulates the outcome.

use aircraft_rta::sim::check::{sweep_table, sweep_values};
use aircraft_rta::sim::{sweep, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sc = Scenario::load(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/extended_intruder.json"))?;
    let rows = sweep(&sc, "rta.alpha.gamma", &sweep_values(0.05, 0.5, 6))?;
    print!("{}", sweep_table("rta.alpha.gamma", &rows));
    Ok(())
}

//! Writes CSV, JSON and SVG artifacts for a scenario into a directory
//! (first argument, default `rta-out`).

use std::path::PathBuf;

use aircraft_rta::sim::{compute_metrics, export, integrate, Format, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "rta-out".into()));
    let sc = Scenario::load(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/backstepping_combined.json"))?;
    let log = integrate(&sc);
    let m = compute_metrics(&sc, &log);
    for f in [Format::Csv, Format::Json, Format::Svg] {
        let (main, side) = export(&sc, &log, &m, f, &dir)?;
        println!("{} ({} bytes), {}", main.display(), std::fs::metadata(&main)?.len(), side.display());
    }
    Ok(())
}

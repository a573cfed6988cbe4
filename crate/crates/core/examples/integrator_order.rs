//! Richardson estimate of the closed-loop integration order on a window where
//! the controller is smooth.

use aircraft_rta::sim::{integrate, Scenario};

fn final_state(sc: &Scenario, dt: f64) -> [f64; 7] {
    let mut s = sc.clone();
    s.dt = dt;
    integrate(&s).records.last().expect("non-empty log").x.to_array()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sc = Scenario::load(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/smooth_segment.json"))?;
    let xs: Vec<[f64; 7]> = [0.02, 0.01, 0.005].iter().map(|&dt| final_state(&sc, dt)).collect();
    let dist = |a: &[f64; 7], b: &[f64; 7]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let (e1, e2) = (dist(&xs[0], &xs[1]), dist(&xs[1], &xs[2]));
    println!("|x(0.02) - x(0.01)|  = {e1:e}");
    println!("|x(0.01) - x(0.005)| = {e2:e}");
    println!("observed order       = {:.3}", (e1 / e2).log2());
    Ok(())
}

//! Backstepping CLF tracking from a 100 m lateral offset, no safety filter.
//! Compares V(t) with the guaranteed envelope V(0) e^{-λ t}.

use aircraft_rta::sim::{integrate, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sc = Scenario::load(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/tracking_step.json"))?;
    let log = integrate(&sc);
    let v0 = log.records[0].eval.lyapunov;
    let lam = sc.tracking.lambda;
    for r in log.records.iter().step_by(500) {
        let (r_g, _, _) = sc.goal.sample(r.t);
        let err = (r.x.position() - r_g).norm();
        println!(
            "t={:5.1}  |r - r_g|={:8.3}  V={:10.5}  V(0)e^(-lt)={:10.5}  P={:+.4}",
            r.t,
            err,
            r.eval.lyapunov,
            v0 * (-lam * r.t).exp(),
            r.eval.u.p
        );
    }
    Ok(())
}

//! Extended-barrier RTA avoiding a crossing intruder. The roll channel is
//! never touched, so the avoidance is a climb driven by thrust and pitch.

use aircraft_rta::sim::{check, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sc = Scenario::load(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/extended_intruder.json"))?;
    let (log, m, report) = check(&sc);
    for r in log.records.iter().step_by(1000) {
        println!(
            "t={:6.1}  d={:8.2}  theta={:+.3}  A_T={:+7.3}  Q={:+.4}  h_p={:8.2}  h_e={:8.2}",
            r.t, r.x.d, r.x.theta, r.eval.u.a_t, r.eval.u.q, r.eval.h_p, r.eval.h_mode
        );
    }
    println!("intervention {:.2} s, max |P - P_d| = {:e}", m.intervention_duration, m.max_roll_deviation);
    println!("{report}");
    Ok(())
}

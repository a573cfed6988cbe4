//! Extended-barrier RTA in front of a geofence: without the roll channel the
//! only safe response is to brake, and the aircraft bleeds off nearly all of
//! its speed while holding position in front of the fence.

use aircraft_rta::sim::{check, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sc = Scenario::load(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/extended_geofence.json"))?;
    let (log, m, report) = check(&sc);
    for r in log.records.iter().step_by(500) {
        println!(
            "t={:6.1}  e={:9.2}  V_T={:7.2}  A_T={:+7.3}  h_p={:8.2}",
            r.t, r.x.e, r.x.v_t, r.eval.u.a_t, r.eval.h_p
        );
    }
    if let Some(a) = &log.abort {
        println!("ended early at t = {}: {}", a.t, a.reason);
    }
    println!("min V_T = {:.3} m/s", m.min_speed);
    println!("{report}");
    Ok(())
}

//! Backstepping barrier with an intruder and two geofence planes. Unlike the
//! extended barrier, h_b depends on bank angle so the filter also rolls.

use aircraft_rta::backstepping_rta::{grad_h_b, h_b};
use aircraft_rta::sim::{check, RtaConfig, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sc = Scenario::load(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/backstepping_combined.json"))?;
    let RtaConfig::Backstepping(params) = &sc.rta else { unreachable!("scenario uses backstepping") };
    let (log, m, report) = check(&sc);
    for r in log.records.iter().step_by(1000) {
        let ev = h_b(&r.x, r.t, &sc.constraints, params, &sc.model)?;
        let (_, grad, _) = grad_h_b(&r.x, r.t, &sc.constraints, params, &sc.model)?;
        println!(
            "t={:6.1}  h_e={:8.2}  h_b={:8.2}  R_s={:+.4}  R={:+.4}  dh_b/dphi={:+.3e}  P={:+.4}",
            r.t, ev.h_e, ev.h_b, ev.r_s, ev.r, grad[3], r.eval.u.p
        );
    }
    println!("min h_i = {:?}", m.min_h_members);
    println!("{report}");
    Ok(())
}

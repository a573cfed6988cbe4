//! Model-free RTA: a smooth safety filter on the commanded velocity, tracked by
//! the backstepping controller. Also prints the Lyapunov-shifted barrier h_V.

use aircraft_rta::modelfree_rta::safe_velocity;
use aircraft_rta::sim::{check, RtaConfig, Scenario};
use aircraft_rta::tracking_controller::desired_velocity;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sc = Scenario::load(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/modelfree_combined.json"))?;
    let RtaConfig::ModelFree(params) = &sc.rta else { unreachable!("scenario uses the model-free strategy") };
    let (log, m, report) = check(&sc);
    for r in log.records.iter().step_by(1000) {
        let pos = r.x.position();
        let v_d = desired_velocity(&pos, r.t, &sc.goal, &sc.tracking);
        let s = safe_velocity(&pos, r.t, &v_d, &sc.constraints, params)?;
        println!(
            "t={:6.1}  |v_d|={:7.2}  |v_s|={:7.2}  v_s.d={:+.2e}  h_p={:8.2}  V={:9.4}  h_V={:8.2}",
            r.t,
            v_d.norm(),
            s.v_s.norm(),
            s.v_s[2],
            r.eval.h_p,
            r.eval.lyapunov,
            r.eval.h_mode
        );
    }
    println!("peak |A_T|, |P|, |Q| = {:?}", m.max_abs_inputs);
    println!("max |d| = {:e}", m.max_abs_down);
    println!("{report}");
    Ok(())
}

//! Smooth AND-composition of one moving intruder and two geofence planes.

use aircraft_rta::constraints::{
    softmin, Constraint, ConstraintSet, GeofencePlane, MovingObstacle, ObstacleTrajectory,
};
use aircraft_rta::linalg::Vec3;

fn main() -> aircraft_rta::Result<()> {
    let intruder = ObstacleTrajectory::constant_velocity(Vec3([-3048.0, 0.0, 0.0]), Vec3([121.92, 161.32, 0.0]));
    let fence_a = GeofencePlane::new(Vec3([0.0, 11901.0, 0.0]), Vec3([-4.0, -1.0, 0.0]), 15.0)?;
    let fence_b = GeofencePlane::new(Vec3([0.0, 11901.0, 0.0]), Vec3([-2.0, -1.0, 0.0]), 15.0)?;
    let set = ConstraintSet::new(
        0.007,
        vec![
            Constraint::Obstacle(MovingObstacle::new(intruder, 30.0)?),
            Constraint::Geofence(fence_a),
            Constraint::Geofence(fence_b),
        ],
    )?;

    println!("{:>6} {:>10} {:>10} {:>10} {:>10} {:>10}", "t", "h_1", "h_2", "h_3", "min", "h_p");
    for k in 0..=6 {
        let t = 4.0 * k as f64;
        let r = Vec3([0.0, 161.32 * t, 0.0]);
        let h = set.compose_h_p(&r, t)?;
        let hard = h.per_constraint.iter().copied().fold(f64::INFINITY, f64::min);
        println!(
            "{t:6.1} {:10.2} {:10.2} {:10.2} {hard:10.2} {:10.2}",
            h.per_constraint[0], h.per_constraint[1], h.per_constraint[2], h.value
        );
    }

    // the softmin gap is at most ln(N)/κ
    for kappa in [0.007, 0.07, 0.7] {
        let vals = [10.0, 12.0, 15.0];
        let s = softmin(&vals, kappa);
        println!("kappa={kappa:<6} softmin={s:10.4}  bound min-ln(3)/kappa={:10.4}", 10.0 - 3f64.ln() / kappa);
    }
    Ok(())
}

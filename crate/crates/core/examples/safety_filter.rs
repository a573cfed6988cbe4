//! Hard and smooth closed-form safety filters on a single affine constraint
//! `a + b (u - u_d) >= 0`, swept across the activation boundary.

use aircraft_rta::linalg::{Mat3, Vec3};
use aircraft_rta::safety_filter::{apply_filter, FilterMode, WeightFactor};

fn main() -> aircraft_rta::Result<()> {
    let w = WeightFactor::diag([6.0, 0.6, 0.1])?;
    let u_d = Vec3([1.0, 0.0, 0.05]);
    let b_raw = Vec3([0.5, 0.0, 2.0]);
    println!("Gamma metric = {:?}", w.gamma_metric().0);
    println!("{:>6} {:>30} {:>30}", "a", "hard u", "smooth u (nu=1)");
    for k in -4..=4 {
        let a = k as f64 * 0.5;
        let hard = apply_filter(&u_d, a, &b_raw, w.matrix(), FilterMode::Hard);
        let smooth = apply_filter(&u_d, a, &b_raw, w.matrix(), FilterMode::Smooth { nu: 1.0 });
        println!(
            "{a:6.2}  ({:8.4},{:8.4},{:8.4})  ({:8.4},{:8.4},{:8.4})",
            hard.u[0], hard.u[1], hard.u[2], smooth.u[0], smooth.u[1], smooth.u[2]
        );
    }
    let blocked = apply_filter(&u_d, -1.0, &Vec3::zero(), &Mat3::identity(), FilterMode::Hard);
    println!("zero gradient with a < 0: infeasible = {}", blocked.infeasible);
    Ok(())
}

//! Open-loop propagation of the 3D Dubins aircraft in a coordinated turn,
//! plus the acceleration map M_a and its inverse at the final state.

use aircraft_rta::aircraft_model::{AircraftModel, AircraftState, ControlInput};

fn main() -> aircraft_rta::Result<()> {
    let model = AircraftModel::default();
    let mut x = AircraftState { phi: 0.3, ..AircraftState::level(std::f64::consts::FRAC_PI_2, 161.32) };
    let u = ControlInput::zero();
    let dt = 0.01;
    for k in 0..=2000 {
        if k % 500 == 0 {
            let w = x.wrapped();
            println!(
                "t={:5.1}  n={:9.2} e={:9.2} d={:6.2}  psi={:+.4}  R={:.5}",
                k as f64 * dt,
                w.n,
                w.e,
                w.d,
                w.psi,
                model.turn_rate(&x)?
            );
        }
        // plain RK4 with constant input
        let k1 = model.dynamics(&x, &u)?;
        let k2 = model.dynamics(&x.offset(&k1, dt / 2.0), &u)?;
        let k3 = model.dynamics(&x.offset(&k2, dt / 2.0), &u)?;
        let k4 = model.dynamics(&x.offset(&k3, dt), &u)?;
        let dx: [f64; 7] = std::array::from_fn(|i| (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0);
        x = x.offset(&dx, dt);
    }
    let m = model.accel_matrix(&x)?;
    let inv = model.accel_matrix_inverse(&x)?;
    println!("M_a      = {:?}", m.0);
    println!("M_a^-1   = {:?}", inv.0);
    println!("max |M_a M_a^-1 - I| = {:e}", m.mul_mat(&inv).max_abs_diff(&aircraft_rta::linalg::Mat3::identity()));
    Ok(())
}

//! Free response on a platform held at a constant tilt.
//!
//! The leaky integrator slowly forgets the tilt (time constant 1/c_L = 80 s),
//! so the body drifts toward the closed-form steady lean over several minutes.

use std::f64::consts::PI;

use dec_sim::analysis::steady_state_lean;
use dec_sim::simulate::SimOptions;
use dec_sim::{Condition, Params};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = Params::default();
    let lean = steady_state_lean(&params, PI / 15.0)?;
    let opts = SimOptions {
        t_end: Some(900.0),
        step: 1e-2,
        ..Default::default()
    };
    let traj = Condition::TiltedFree.run(&params, &opts)?;

    println!("steady lean {lean:.6} rad");
    println!("{:>6} {:>12} {:>14} {:>12}", "t", "x1", "tilt estimate", "x1 - lean");
    for ((t, s), sig) in traj.times.iter().zip(&traj.states).zip(&traj.signals).step_by(6000) {
        println!("{t:>6.0} {:>12.6} {:>14.6} {:>12.3e}", s.sway, sig.tilt_estimate, s.sway - lean);
    }
    Ok(())
}

//! Forced response to `u(t) = 0.1·cos(10 t)`, with and without the dead band.
//!
//! Pass a path to also write the trajectory CSV.

use std::env;
use std::fs;

use dec_sim::analysis::peak_to_peak_gain;
use dec_sim::cli::output::trajectory_csv;
use dec_sim::simulate::SimOptions;
use dec_sim::{Condition, Params};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = Params::default();
    for threshold in [params.ctrl.threshold, 0.0] {
        let traj = Condition::Sinusoidal.run(&params.with_threshold(threshold), &SimOptions::default())?;
        let mismatch = traj
            .times
            .iter()
            .zip(&traj.states)
            .filter(|(t, _)| **t >= 10.0)
            .map(|(_, s)| (s.sway_estimate - s.sway).abs())
            .fold(0.0, f64::max);
        println!(
            "theta = {threshold:<7} gain = {:.6}  max |x3 - x1| after 10 s = {mismatch:.3e}",
            peak_to_peak_gain(&traj, 0.5)?
        );
        if threshold > 0.0 {
            if let Some(path) = env::args().nth(1) {
                fs::write(&path, trajectory_csv(&traj))?;
                println!("wrote {path}");
            }
        }
    }
    Ok(())
}

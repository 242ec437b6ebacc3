//! Free response on a level platform from a leaning start.
//!
//! The sway estimate stays equal to the true sway for the whole run, and the
//! pendulum settles upright.

use dec_sim::simulate::{DerivativePath, SimOptions};
use dec_sim::{Condition, Params};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = Params::default();
    let traj = Condition::LevelFree.run(&params, &SimOptions::default())?;

    println!("{:>6} {:>12} {:>12} {:>12}", "t", "x1", "x2", "x3 - x1");
    for (t, s) in traj.times.iter().zip(&traj.states).step_by(2000) {
        println!("{t:>6.1} {:>12.6} {:>12.6} {:>12.3e}", s.sway, s.sway_rate, s.sway_estimate - s.sway);
    }

    let blocks = Condition::LevelFree.run(
        &params,
        &SimOptions {
            path: DerivativePath::Blocks,
            ..Default::default()
        },
    )?;
    println!("block-diagram vs state-space: {:.3e}", traj.max_state_difference(&blocks));
    Ok(())
}

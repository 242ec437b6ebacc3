//! Peak-to-peak gain against input amplitude at 10 rad/s.
//!
//! Below the threshold the dead band swallows the whole input and the gain is
//! flat. Set `DEC_SIM_THREADS` to cap the worker pool.

use dec_sim::analysis::{default_amplitudes, sweep_gain, SweepOptions};
use dec_sim::Params;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = Params::default();
    let curve = sweep_gain(&params, &default_amplitudes(), 10.0, &SweepOptions::default())?;
    println!("{:>11} {:>10}  regime", "amplitude", "gain");
    for ((a, g), r) in curve.amplitudes.iter().zip(&curve.gains).zip(&curve.regimes) {
        println!("{a:>11.3e} {g:>10.6}  {r}");
    }
    Ok(())
}

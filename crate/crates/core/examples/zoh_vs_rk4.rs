//! RK4 against the exact zero-order-hold solution on the same held input,
//! and the error ratio as the step halves.

use dec_sim::simulate::{rk4_integrate, DerivativePath, HeldInput};
use dec_sim::stability::zoh_solution;
use dec_sim::statespace::system;
use dec_sim::{Condition, InputSignal, Params};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = Params::default();
    let matrices = system(&params);
    let x0 = Condition::LevelFree.initial_state();
    let t_end = 10.0;
    let hold = 0.02;
    let held = HeldInput::sample(&InputSignal::cosine(0.1, 10.0), hold, t_end);
    let exact = zoh_solution(&matrices, x0, &held.samples, hold)?;

    let mut last: Option<f64> = None;
    for h in [0.02, 0.01, 0.005, 0.0025] {
        let rk = rk4_integrate(DerivativePath::StateSpace, &params, x0, &held, t_end, h)?;
        let stride = (hold / h).round() as usize;
        let err = exact
            .states
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let r = rk.states[k * stride].to_array();
                e.to_array().iter().zip(r).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        match last {
            Some(prev) => println!("h = {h:<7} error = {err:.3e}  ratio = {:.2}", prev / err),
            None => println!("h = {h:<7} error = {err:.3e}"),
        }
        last = Some(err);
    }
    Ok(())
}

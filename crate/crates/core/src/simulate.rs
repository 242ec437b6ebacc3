//! Fixed-step time-domain simulation.

use std::f64::consts::PI;

use crate::blocks::{block_derivative, loop_signals};
use crate::error::SimError;
use crate::model::{Params, State};
use crate::statespace::{build_coefficients, closed_loop_derivative};

/// Any state component beyond this magnitude aborts the run.
pub const DIVERGENCE_LIMIT: f64 = 1e6;

/// Default integration step [s].
pub const DEFAULT_STEP: f64 = 1e-3;

/// Platform velocity `u(t)` [rad/s].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputSignal {
    Zero,
    Constant(f64),
    /// `amplitude · cos(omega · t + phase)`
    Sinusoid { amplitude: f64, omega: f64, phase: f64 },
}

impl InputSignal {
    pub fn cosine(amplitude: f64, omega: f64) -> Self {
        InputSignal::Sinusoid {
            amplitude,
            omega,
            phase: 0.0,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            InputSignal::Zero => 0.0,
            InputSignal::Constant(u) => u,
            InputSignal::Sinusoid {
                amplitude,
                omega,
                phase,
            } => amplitude * (omega * t + phase).cos(),
        }
    }
}

/// Source of the input values seen by the three RK4 stages of one step.
pub trait Input {
    /// Values at `t`, `t + h/2` and `t + h`.
    fn stage_values(&self, t: f64, h: f64) -> [f64; 3];
}

impl Input for InputSignal {
    fn stage_values(&self, t: f64, h: f64) -> [f64; 3] {
        [self.value(t), self.value(t + 0.5 * h), self.value(t + h)]
    }
}

/// Piecewise-constant input: `samples[k]` holds on `[k·hold, (k+1)·hold)`.
///
/// A step that starts inside an interval sees that interval's value at every
/// stage, so integrator steps should divide `hold`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeldInput {
    pub samples: Vec<f64>,
    pub hold: f64,
}

impl HeldInput {
    /// Samples `signal` at the start of every hold interval covering `t_end`.
    pub fn sample(signal: &InputSignal, hold: f64, t_end: f64) -> Self {
        let n = (t_end / hold).round() as usize;
        Self {
            samples: (0..n).map(|k| signal.value(k as f64 * hold)).collect(),
            hold,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        let k = (t / self.hold).floor().max(0.0) as usize;
        self.samples[k.min(self.samples.len() - 1)]
    }
}

impl Input for HeldInput {
    fn stage_values(&self, t: f64, h: f64) -> [f64; 3] {
        let v = self.value(t + 0.5 * h);
        [v, v, v]
    }
}

/// Signals derived from the state and input at one sample.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Signals {
    pub u: f64,
    pub ankle_angle: f64,
    pub tilt_estimate: f64,
    pub error: f64,
    pub active_torque: f64,
    pub passive_torque: f64,
    pub gravity_torque: f64,
}

impl Signals {
    pub fn compute(params: &Params, state: &State, u: f64) -> Self {
        let s = loop_signals(&params.plant, &params.ctrl, state, u);
        Signals {
            u,
            ankle_angle: s.ankle_angle,
            tilt_estimate: s.tilt_estimate,
            error: s.error,
            active_torque: s.torques.active,
            passive_torque: s.torques.passive,
            gravity_torque: s.torques.gravity,
        }
    }
}

/// Uniformly sampled simulation output.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub step: f64,
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub signals: Vec<Signals>,
}

impl Trajectory {
    /// Builds a trajectory sampled at `k·step`, recomputing the derived signals.
    pub fn from_states(params: &Params, step: f64, states: Vec<State>, inputs: Vec<f64>) -> Self {
        assert_eq!(states.len(), inputs.len());
        let times = (0..states.len()).map(|k| k as f64 * step).collect();
        let signals = states
            .iter()
            .zip(&inputs)
            .map(|(s, &u)| Signals::compute(params, s, u))
            .collect();
        Self {
            step,
            times,
            states,
            signals,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &State {
        self.states.last().expect("trajectory is never empty")
    }

    /// One state component across all samples (0 = sway … 3 = platform tilt).
    pub fn component(&self, index: usize) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().map(move |s| s.to_array()[index])
    }

    /// Largest per-component difference to another trajectory of equal length.
    pub fn max_state_difference(&self, other: &Trajectory) -> f64 {
        assert_eq!(self.len(), other.len(), "trajectories differ in length");
        self.states
            .iter()
            .zip(&other.states)
            .flat_map(|(a, b)| {
                let (a, b) = (a.to_array(), b.to_array());
                (0..4).map(move |i| (a[i] - b[i]).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Which of the two algebraically identical derivative routes to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativePath {
    Blocks,
    StateSpace,
}

fn add_scaled(x: &[f64; 4], k: &[f64; 4], s: f64) -> [f64; 4] {
    [x[0] + s * k[0], x[1] + s * k[1], x[2] + s * k[2], x[3] + s * k[3]]
}

/// Classical fourth-order Runge–Kutta with a fixed step.
///
/// The run covers `round(t_end / h)` steps; sample `k` sits at `k·h`.
pub fn rk4_integrate(
    path: DerivativePath,
    params: &Params,
    x0: State,
    input: &impl Input,
    t_end: f64,
    h: f64,
) -> Result<Trajectory, SimError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(SimError::InvalidStep(h));
    }
    if !(t_end >= h && t_end.is_finite()) {
        return Err(SimError::InvalidDuration { t_end, step: h });
    }
    let n = (t_end / h).round() as usize;

    let coeffs = build_coefficients(params);
    let deriv = |x: &[f64; 4], u: f64| -> [f64; 4] {
        let s = State::from_array(*x);
        match path {
            DerivativePath::Blocks => block_derivative(&params.plant, &params.ctrl, &s, u),
            DerivativePath::StateSpace => closed_loop_derivative(&coeffs, params, &s, u),
        }
        .to_array()
    };

    let mut states = Vec::with_capacity(n + 1);
    let mut inputs = Vec::with_capacity(n + 1);
    let mut x = x0.to_array();
    states.push(x0);

    for k in 0..n {
        let t = k as f64 * h;
        let [u0, um, u1] = input.stage_values(t, h);
        let k1 = deriv(&x, u0);
        let k2 = deriv(&add_scaled(&x, &k1, 0.5 * h), um);
        let k3 = deriv(&add_scaled(&x, &k2, 0.5 * h), um);
        let k4 = deriv(&add_scaled(&x, &k3, h), u1);
        for i in 0..4 {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let s = State::from_array(x);
        if !s.is_finite() || s.max_abs() > DIVERGENCE_LIMIT {
            return Err(SimError::Diverged {
                step: k + 1,
                time: (k + 1) as f64 * h,
            });
        }
        states.push(s);
        inputs.push(u0);
    }
    inputs.push(input.stage_values(n as f64 * h, h)[0]);

    Ok(Trajectory::from_states(params, h, states, inputs))
}

/// The three reference experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// Free response on a level platform.
    LevelFree,
    /// Free response on a platform held at a constant tilt.
    TiltedFree,
    /// Forced response to `u(t) = 0.1·cos(10 t)` from rest.
    Sinusoidal,
}

impl Condition {
    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Condition::LevelFree),
            2 => Some(Condition::TiltedFree),
            3 => Some(Condition::Sinusoidal),
            _ => None,
        }
    }

    pub fn initial_state(self) -> State {
        match self {
            Condition::LevelFree => State::new(PI / 10.0, 0.1, PI / 10.0, 0.0),
            Condition::TiltedFree => State::new(PI / 10.0, 0.1, PI / 10.0, PI / 15.0),
            Condition::Sinusoidal => State::ZERO,
        }
    }

    pub fn input(self) -> InputSignal {
        match self {
            Condition::LevelFree | Condition::TiltedFree => InputSignal::Zero,
            Condition::Sinusoidal => InputSignal::cosine(0.1, 10.0),
        }
    }

    pub fn default_duration(self) -> f64 {
        match self {
            Condition::TiltedFree => 60.0,
            _ => 20.0,
        }
    }

    pub fn run(self, params: &Params, opts: &SimOptions) -> Result<Trajectory, SimError> {
        rk4_integrate(
            opts.path,
            params,
            self.initial_state(),
            &self.input(),
            opts.t_end.unwrap_or_else(|| self.default_duration()),
            opts.step,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    /// Falls back to the condition's default duration when unset.
    pub t_end: Option<f64>,
    pub step: f64,
    pub path: DerivativePath,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            t_end: None,
            step: DEFAULT_STEP,
            path: DerivativePath::StateSpace,
        }
    }
}

pub fn condition1(params: &Params) -> Result<Trajectory, SimError> {
    Condition::LevelFree.run(params, &SimOptions::default())
}

pub fn condition2(params: &Params) -> Result<Trajectory, SimError> {
    Condition::TiltedFree.run(params, &SimOptions::default())
}

pub fn condition3(params: &Params) -> Result<Trajectory, SimError> {
    Condition::Sinusoidal.run(params, &SimOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rest_stays_at_rest() {
        let traj = rk4_integrate(
            DerivativePath::Blocks,
            &Params::default(),
            State::ZERO,
            &InputSignal::Zero,
            2.0,
            0.01,
        )
        .unwrap();
        assert_eq!(traj.len(), 201);
        assert!(traj.states.iter().all(|s| *s == State::ZERO));
    }

    #[test]
    fn rejects_bad_steps_and_durations() {
        let p = Params::default();
        let run = |t_end, h| rk4_integrate(DerivativePath::StateSpace, &p, State::ZERO, &InputSignal::Zero, t_end, h);
        assert_eq!(run(1.0, 0.0).unwrap_err(), SimError::InvalidStep(0.0));
        assert!(matches!(run(1.0, f64::NAN), Err(SimError::InvalidStep(_))));
        assert!(matches!(run(0.001, 0.01), Err(SimError::InvalidDuration { .. })));
    }

    #[test]
    fn unstable_gains_report_divergence() {
        let p = Params::default().with_gains(0.0, 0.0);
        let err = rk4_integrate(
            DerivativePath::StateSpace,
            &p,
            State::new(0.1, 0.0, 0.1, 0.0),
            &InputSignal::Zero,
            1000.0,
            0.01,
        )
        .unwrap_err();
        assert!(matches!(err, SimError::Diverged { step, .. } if step > 0));
    }

    #[test]
    fn uniform_time_grid() {
        let traj = condition1(&Params::default()).unwrap();
        assert_eq!(traj.len(), 20_001);
        for (k, t) in traj.times.iter().enumerate() {
            assert_eq!(*t, k as f64 * 1e-3);
        }
    }

    #[test]
    fn held_input_lookup() {
        let held = HeldInput {
            samples: vec![1.0, 2.0, 3.0],
            hold: 0.5,
        };
        assert_eq!(held.value(0.0), 1.0);
        assert_eq!(held.value(0.74), 2.0);
        assert_eq!(held.value(9.0), 3.0);
        assert_eq!(held.stage_values(0.25, 0.25), [1.0; 3]);
    }

    #[test]
    fn sinusoid_values() {
        let s = InputSignal::cosine(0.1, 10.0);
        assert_eq!(s.value(0.0), 0.1);
        assert!((s.value(PI / 20.0)).abs() < 1e-17);
        assert_eq!(InputSignal::Constant(0.3).value(7.0), 0.3);
    }
}

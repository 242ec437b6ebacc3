//! Individual blocks of the disturbance-estimate-and-compensation loop.
//!
//! Every block is a pure function. [`block_derivative`] wires them together
//! exactly as the block diagram does and serves as an independent route to
//! the closed-loop dynamics assembled in [`crate::statespace`].
//!
//! Sensing is assumed perfect: measured angles and rates equal the true ones.

use crate::model::{gravity_gain, ControlParams, PlantParams, State};

/// Torques acting on the pendulum at one instant [N·m].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TorqueBreakdown {
    pub passive: f64,
    pub gravity: f64,
    pub gravity_compensation: f64,
    pub servo: f64,
    /// Total active ankle torque, `servo - gravity_compensation`.
    pub active: f64,
}

/// Passive ankle torque from stiffness and damping.
pub fn passive_torque(plant: &PlantParams, ankle_angle: f64, ankle_rate: f64) -> f64 {
    plant.passive_stiffness * ankle_angle + plant.passive_damping * ankle_rate
}

/// Linearised gravity torque `m·g·h_B·alpha_BS`.
pub fn gravity_torque(plant: &PlantParams, sway: f64) -> f64 {
    plant.gravity_stiffness() * sway
}

/// Compensation torque computed from the measured (not estimated) sway.
pub fn gravity_compensation(gain: f64, measured_sway: f64) -> f64 {
    gain * measured_sway
}

/// Dead-band threshold applied to the platform-velocity estimate.
///
/// Zero on the closed band `[-theta, theta]`, shifted identity outside it.
pub fn deadband(threshold: f64, v: f64) -> f64 {
    if v <= -threshold {
        v + threshold
    } else if v >= threshold {
        v - threshold
    } else {
        0.0
    }
}

/// Platform velocity reconstructed from vestibular and proprioceptive rates.
pub fn fs_rate_estimate(sway_rate_meas: f64, ankle_rate_meas: f64) -> f64 {
    sway_rate_meas - ankle_rate_meas
}

/// Time derivative of the leaky tilt integrator. The caller integrates it.
pub fn leaky_integrator_rate(leak_rate: f64, tilt_estimate: f64, thresholded_rate: f64) -> f64 {
    thresholded_rate - leak_rate * tilt_estimate
}

/// Body-sway estimate fed to the servo: tilt estimate plus measured ankle angle.
pub fn body_sway_estimate(tilt_estimate: f64, ankle_angle_meas: f64) -> f64 {
    tilt_estimate + ankle_angle_meas
}

/// PD servo torque on the sway-estimate error.
pub fn servo_torque(ctrl: &ControlParams, error: f64, error_rate: f64) -> f64 {
    ctrl.kp * error + ctrl.kd * error_rate
}

/// Intermediate signals of one evaluation of the loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopSignals {
    pub ankle_angle: f64,
    pub ankle_rate: f64,
    pub tilt_estimate: f64,
    pub tilt_estimate_rate: f64,
    pub sway_estimate_rate: f64,
    pub error: f64,
    pub torques: TorqueBreakdown,
}

/// Evaluates every block for `state` under platform velocity `u`.
pub fn loop_signals(plant: &PlantParams, ctrl: &ControlParams, state: &State, u: f64) -> LoopSignals {
    let ankle_angle = state.sway - state.platform_tilt;
    let ankle_rate = state.sway_rate - u;

    let fs_rate = fs_rate_estimate(state.sway_rate, ankle_rate);
    let tilt_estimate = state.sway_estimate - ankle_angle;
    let tilt_estimate_rate =
        leaky_integrator_rate(ctrl.leak_rate, tilt_estimate, deadband(ctrl.threshold, fs_rate));
    // d/dt of body_sway_estimate(tilt_estimate, ankle_angle)
    let sway_estimate_rate = tilt_estimate_rate + ankle_rate;

    let error = state.sway_estimate - ctrl.alpha_ref;
    let servo = servo_torque(ctrl, error, sway_estimate_rate);
    let compensation = gravity_compensation(gravity_gain(plant, ctrl), state.sway);

    let torques = TorqueBreakdown {
        passive: passive_torque(plant, ankle_angle, ankle_rate),
        gravity: gravity_torque(plant, state.sway),
        gravity_compensation: compensation,
        servo,
        active: -compensation + servo,
    };

    LoopSignals {
        ankle_angle,
        ankle_rate,
        tilt_estimate,
        tilt_estimate_rate,
        sway_estimate_rate,
        error,
        torques,
    }
}

/// Closed-loop state derivative obtained by composing the individual blocks.
pub fn block_derivative(plant: &PlantParams, ctrl: &ControlParams, state: &State, u: f64) -> State {
    let s = loop_signals(plant, ctrl, state, u);
    let t = s.torques;
    State {
        sway: state.sway_rate,
        sway_rate: (t.active + t.passive + t.gravity) / plant.inertia,
        sway_estimate: s.sway_estimate_rate,
        platform_tilt: u,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const THETA: f64 = 0.0028;

    #[test]
    fn passive_torque_values() {
        let plant = PlantParams::default();
        assert_eq!(passive_torque(&plant, 0.0, 0.0), 0.0);
        assert!((passive_torque(&plant, 0.1, 0.0) - 15.731).abs() < 1e-12);
        assert!((passive_torque(&plant, 0.0, 0.1) - 3.932).abs() < 1e-12);
    }

    #[test]
    fn gravity_torque_values() {
        let plant = PlantParams::default();
        assert_eq!(gravity_torque(&plant, 0.0), 0.0);
        assert!((gravity_torque(&plant, 0.1) - 70.632).abs() < 1e-12);
        assert_eq!(gravity_torque(&plant, 0.2), 2.0 * gravity_torque(&plant, 0.1));
    }

    #[test]
    fn gravity_compensation_values() {
        assert_eq!(gravity_compensation(564.096, 0.0), 0.0);
        assert!((gravity_compensation(564.096, 0.1) - 56.4096).abs() < 1e-12);
        assert_eq!(gravity_compensation(3.0, -0.4), -gravity_compensation(3.0, 0.4));
    }

    #[test]
    fn deadband_piecewise_values() {
        assert_eq!(deadband(THETA, 0.0), 0.0);
        assert_eq!(deadband(THETA, THETA), 0.0);
        assert_eq!(deadband(THETA, -THETA), 0.0);
        assert!((deadband(THETA, 0.01) - 0.0072).abs() < 1e-15);
        assert!((deadband(THETA, -0.01) + 0.0072).abs() < 1e-15);
        assert_eq!(deadband(THETA, 0.001), 0.0);
    }

    #[test]
    fn deadband_with_zero_threshold_is_identity() {
        for v in [-3.0, -1e-9, 0.0, 2e-7, 5.0] {
            assert_eq!(deadband(0.0, v), v);
        }
    }

    #[test]
    fn fs_rate_values() {
        assert_eq!(fs_rate_estimate(0.2, 0.2), 0.0);
        assert!((fs_rate_estimate(0.3, 0.1) - 0.2).abs() < 1e-15);
        // perfect sensing: ankle rate is sway rate minus platform rate
        let (sway_rate, u) = (0.37, -0.05);
        assert!((fs_rate_estimate(sway_rate, sway_rate - u) - u).abs() < 1e-15);
    }

    #[test]
    fn leaky_integrator_values() {
        assert_eq!(leaky_integrator_rate(0.0125, 0.0, 0.0), 0.0);
        assert_eq!(leaky_integrator_rate(0.0125, 1.0, 0.0), -0.0125);
    }

    #[test]
    fn leaky_integrator_decays_exponentially() {
        // explicit Euler with a tiny step approaches exp(-c t)
        let c = 0.0125;
        let (mut y, h) = (1.0, 1e-3);
        for _ in 0..10_000 {
            y += h * leaky_integrator_rate(c, y, 0.0);
        }
        assert!((y - (-c * 10.0_f64).exp()).abs() < 1e-5);
    }

    #[test]
    fn body_sway_estimate_values() {
        assert_eq!(body_sway_estimate(0.0, 0.1), 0.1);
        let est = body_sway_estimate(PI / 15.0, PI / 10.0 - PI / 15.0);
        assert!((est - PI / 10.0).abs() < 1e-15);
        assert_eq!(body_sway_estimate(0.25, 0.5), body_sway_estimate(0.25, 0.0) + 0.5);
    }

    #[test]
    fn servo_torque_values() {
        let ctrl = ControlParams::default();
        assert_eq!(servo_torque(&ctrl, 0.0, 0.0), 0.0);
        assert!((servo_torque(&ctrl, 0.1, 0.0) + 120.0).abs() < 1e-12);
        assert!((servo_torque(&ctrl, 0.0, 0.1) + 100.0).abs() < 1e-12);
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let d = block_derivative(&PlantParams::default(), &ControlParams::default(), &State::ZERO, 0.0);
        assert_eq!(d, State::ZERO);
    }

    #[test]
    fn dead_zone_input_from_rest() {
        let plant = PlantParams::default();
        let ctrl = ControlParams::default();
        let u = 0.5 * THETA;
        let d = block_derivative(&plant, &ctrl, &State::ZERO, u);
        // the estimate misses the platform motion, so it follows the ankle angle
        assert_eq!(d.sway_estimate, -u);
        let f = -(ctrl.kd + plant.passive_damping) * u;
        assert!((d.sway_rate - f / plant.inertia).abs() < 1e-15);
        assert_eq!(d.platform_tilt, u);
    }

    #[test]
    fn torque_breakdown_sums() {
        let plant = PlantParams::default();
        let ctrl = ControlParams::default();
        let s = loop_signals(&plant, &ctrl, &State::new(0.1, -0.2, 0.05, 0.03), 0.04);
        let t = s.torques;
        assert_eq!(t.active, -t.gravity_compensation + t.servo);
    }

    #[test]
    fn estimate_error_decays_with_leak_rate_on_level_platform() {
        let plant = PlantParams::default();
        let ctrl = ControlParams::default();
        let state = State::new(0.3, -0.7, 0.1, 0.0);
        let d = block_derivative(&plant, &ctrl, &state, 0.0);
        let e = state.sway_estimate - state.sway;
        let e_dot = d.sway_estimate - d.sway;
        assert!((e_dot + ctrl.leak_rate * e).abs() < 1e-15);
    }
}

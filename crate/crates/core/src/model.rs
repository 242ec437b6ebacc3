//! Physical and controller parameters of the single-pendulum posture model.
//!
//! Angles follow the usual posture-control convention: `BS` is body-in-space,
//! `BF` body-to-foot (the ankle angle) and `FS` foot-in-space (the platform
//! tilt). They are tied by `alpha_BF = alpha_BS - alpha_FS`.

use std::fmt;

use crate::error::ValidationError;

/// Standard gravitational acceleration [m/s²].
pub const STANDARD_GRAVITY: f64 = 9.81;

/// Mechanical parameters of the body and its passive ankle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantParams {
    /// Moment of inertia about the ankle [kg·m²].
    pub inertia: f64,
    /// Body mass [kg].
    pub mass: f64,
    /// Gravitational acceleration [m/s²].
    pub gravity: f64,
    /// Height of the centre of mass above the ankle [m].
    pub com_height: f64,
    /// Passive ankle stiffness [N·m/rad].
    pub passive_stiffness: f64,
    /// Passive ankle damping [N·m·s/rad].
    pub passive_damping: f64,
}

impl Default for PlantParams {
    fn default() -> Self {
        Self {
            inertia: 71.55,
            mass: 80.0,
            gravity: STANDARD_GRAVITY,
            // half of the 1.80 m body height
            com_height: 0.9,
            passive_stiffness: 157.31,
            passive_damping: 39.32,
        }
    }
}

impl PlantParams {
    /// Gravitational toppling stiffness `m·g·h_B` [N·m/rad].
    pub fn gravity_stiffness(&self) -> f64 {
        self.mass * self.gravity * self.com_height
    }
}

/// Servo gains and sensor-fusion constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlParams {
    /// PD proportional gain [N·m/rad].
    pub kp: f64,
    /// PD derivative gain [N·m·s/rad].
    pub kd: f64,
    /// Fraction of the gravity torque that is compensated, in (0, 1].
    pub gravity_fraction: f64,
    /// Leak rate of the tilt-estimate integrator [1/s].
    pub leak_rate: f64,
    /// Half-width of the velocity dead band [rad/s].
    pub threshold: f64,
    /// Servo set-point [rad]. Only 0 is supported.
    pub alpha_ref: f64,
}

impl Default for ControlParams {
    fn default() -> Self {
        Self {
            kp: -1200.0,
            kd: -1000.0,
            gravity_fraction: 0.8,
            leak_rate: 0.0125,
            threshold: 0.0028,
            alpha_ref: 0.0,
        }
    }
}

/// Closed-loop state `[alpha_BS, d/dt alpha_BS, estimated alpha_BS, alpha_FS]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    pub sway: f64,
    pub sway_rate: f64,
    pub sway_estimate: f64,
    pub platform_tilt: f64,
}

impl State {
    pub const ZERO: State = State::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(sway: f64, sway_rate: f64, sway_estimate: f64, platform_tilt: f64) -> Self {
        Self {
            sway,
            sway_rate,
            sway_estimate,
            platform_tilt,
        }
    }

    pub const fn from_array(x: [f64; 4]) -> Self {
        Self::new(x[0], x[1], x[2], x[3])
    }

    pub const fn to_array(self) -> [f64; 4] {
        [self.sway, self.sway_rate, self.sway_estimate, self.platform_tilt]
    }

    /// Ankle angle `alpha_BF = alpha_BS - alpha_FS`.
    pub fn ankle_angle(&self) -> f64 {
        self.sway - self.platform_tilt
    }

    /// Platform-tilt estimate held by the leaky integrator.
    pub fn tilt_estimate(&self) -> f64 {
        self.sway_estimate - self.ankle_angle()
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl From<[f64; 4]> for State {
    fn from(x: [f64; 4]) -> Self {
        Self::from_array(x)
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:.6}, {:.6}, {:.6}, {:.6}]",
            self.sway, self.sway_rate, self.sway_estimate, self.platform_tilt
        )
    }
}

/// Torque gain of the gravity compensation, `Kg·m·g·h_B` [N·m/rad].
pub fn gravity_gain(plant: &PlantParams, ctrl: &ControlParams) -> f64 {
    ctrl.gravity_fraction * plant.mass * plant.gravity * plant.com_height
}

/// A parameter pair that has passed [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Params {
    pub plant: PlantParams,
    pub ctrl: ControlParams,
}

impl Params {
    pub fn gravity_gain(&self) -> f64 {
        gravity_gain(&self.plant, &self.ctrl)
    }

    pub fn with_gains(mut self, kp: f64, kd: f64) -> Self {
        self.ctrl.kp = kp;
        self.ctrl.kd = kd;
        self
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.ctrl.threshold = threshold;
        self
    }
}

/// A single violated bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: &'static str,
    pub bound: &'static str,
    pub value: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} violates {}", self.field, self.value, self.bound)
    }
}

/// Checks every parameter bound and reports all violations at once.
pub fn validate(plant: PlantParams, ctrl: ControlParams) -> Result<Params, ValidationError> {
    let mut violations = Vec::new();
    let mut check = |field: &'static str, value: f64, bound: &'static str, ok: bool| {
        if !(value.is_finite() && ok) {
            violations.push(Violation { field, bound, value });
        }
    };

    check("J_B", plant.inertia, "J_B > 0", plant.inertia > 0.0);
    check("m", plant.mass, "m > 0", plant.mass > 0.0);
    check("g", plant.gravity, "g > 0", plant.gravity > 0.0);
    check("h_B", plant.com_height, "h_B > 0", plant.com_height > 0.0);
    check("Kp_p", plant.passive_stiffness, "Kp_p >= 0", plant.passive_stiffness >= 0.0);
    check("Kd_p", plant.passive_damping, "Kd_p >= 0", plant.passive_damping >= 0.0);

    check("Kp_a", ctrl.kp, "finite", true);
    check("Kd_a", ctrl.kd, "finite", true);
    check(
        "Kg",
        ctrl.gravity_fraction,
        "0 < Kg <= 1",
        ctrl.gravity_fraction > 0.0 && ctrl.gravity_fraction <= 1.0,
    );
    check("c_L", ctrl.leak_rate, "c_L > 0", ctrl.leak_rate > 0.0);
    check("theta", ctrl.threshold, "theta >= 0", ctrl.threshold >= 0.0);
    check("alpha_ref", ctrl.alpha_ref, "alpha_ref = 0", ctrl.alpha_ref == 0.0);

    if violations.is_empty() {
        Ok(Params { plant, ctrl })
    } else {
        Err(ValidationError { violations })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gravity_gain_with_default_parameters() {
        let p = Params::default();
        // 0.8 · 80 · 9.81 · 0.9
        assert!((p.gravity_gain() - 565.056).abs() < 1e-9);
        let residual = p.plant.gravity_stiffness() - p.gravity_gain();
        assert!((p.plant.gravity_stiffness() - 706.32).abs() < 1e-9);
        assert!((residual - 141.264).abs() < 1e-9);
    }

    #[test]
    fn full_compensation_matches_gravity_stiffness() {
        let plant = PlantParams::default();
        let ctrl = ControlParams {
            gravity_fraction: 1.0,
            ..Default::default()
        };
        assert_eq!(gravity_gain(&plant, &ctrl), plant.gravity_stiffness());
    }

    #[test]
    fn gravity_gain_is_linear_in_each_factor() {
        let plant = PlantParams::default();
        let ctrl = ControlParams::default();
        let base = gravity_gain(&plant, &ctrl);
        let k = 1.7;
        let scaled = [
            gravity_gain(&PlantParams { mass: plant.mass * k, ..plant }, &ctrl),
            gravity_gain(&PlantParams { gravity: plant.gravity * k, ..plant }, &ctrl),
            gravity_gain(&PlantParams { com_height: plant.com_height * k, ..plant }, &ctrl),
            gravity_gain(
                &plant,
                &ControlParams {
                    gravity_fraction: ctrl.gravity_fraction * k / 2.0,
                    ..ctrl
                },
            ) * 2.0,
        ];
        for s in scaled {
            assert!((s - k * base).abs() < 1e-9 * base);
        }
    }

    #[test]
    fn defaults_are_valid() {
        assert!(validate(PlantParams::default(), ControlParams::default()).is_ok());
    }

    #[test]
    fn zero_inertia_is_rejected() {
        let plant = PlantParams {
            inertia: 0.0,
            ..Default::default()
        };
        let err = validate(plant, ControlParams::default()).unwrap_err();
        assert_eq!(err.violations.len(), 1);
        assert_eq!(err.violations[0].field, "J_B");
    }

    #[test]
    fn negative_threshold_is_rejected() {
        let ctrl = ControlParams {
            threshold: -0.001,
            ..Default::default()
        };
        let err = validate(PlantParams::default(), ctrl).unwrap_err();
        assert_eq!(err.violations[0].field, "theta");
        assert!(err.to_string().contains("theta"));
    }

    #[test]
    fn all_violations_are_collected() {
        let plant = PlantParams {
            mass: -1.0,
            passive_damping: f64::NAN,
            ..Default::default()
        };
        let ctrl = ControlParams {
            gravity_fraction: 1.5,
            alpha_ref: 0.1,
            ..Default::default()
        };
        let err = validate(plant, ctrl).unwrap_err();
        let fields: Vec<_> = err.violations.iter().map(|v| v.field).collect();
        assert_eq!(fields, ["m", "Kd_p", "Kg", "alpha_ref"]);
    }

    #[test]
    fn derived_angles() {
        let s = State::new(std::f64::consts::PI / 10.0, 0.1, std::f64::consts::PI / 10.0, std::f64::consts::PI / 15.0);
        assert!((s.ankle_angle() - (std::f64::consts::PI / 10.0 - std::f64::consts::PI / 15.0)).abs() < 1e-15);
        assert!((s.tilt_estimate() - std::f64::consts::PI / 15.0).abs() < 1e-15);
    }
}

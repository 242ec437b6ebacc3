//! Closed loop in coefficient form and as `x' = A x + B(u)`.
//!
//! The input enters only through the platform velocity `u`; the dead band
//! makes `B(u)` nonlinear while `A` stays constant.

use nalgebra::{Matrix4, Vector4};

use crate::blocks::deadband;
use crate::model::{ControlParams, Params, State};

/// Scalar coefficients of the closed-loop rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    /// Alias of the leak rate.
    pub b: f64,
    /// Kept so the row-2 input term can be scaled to an acceleration.
    pub inertia: f64,
}

pub fn build_coefficients(params: &Params) -> Coefficients {
    let Params { plant, ctrl } = params;
    let j = plant.inertia;
    let c = ctrl.leak_rate;
    let kg = params.gravity_gain();
    Coefficients {
        a1: (plant.passive_stiffness + ctrl.kd * c + plant.gravity_stiffness() - kg) / j,
        a2: (ctrl.kd + plant.passive_damping) / j,
        a3: (ctrl.kp - c * ctrl.kd) / j,
        // Negative sign: the passive torque acts on alpha_BF = x1 - x4 and the
        // servo derivative term contributes -c_L·Kd_a·x4 through x3'.
        a4: -(plant.passive_stiffness + c * ctrl.kd) / j,
        b: c,
        inertia: j,
    }
}

/// Input nonlinearities `(f(u), g(u))`.
///
/// `f` is the torque-like term `Kd_a·g(u) - Kd_p·u` [N·m]; it is divided by
/// the inertia where it enters the acceleration row.
pub fn input_nonlinearities(params: &Params, u: f64) -> (f64, f64) {
    let g = deadband(params.ctrl.threshold, u) - u;
    let f = params.ctrl.kd * g - params.plant.passive_damping * u;
    (f, g)
}

/// `g(u)` alone, which depends only on the threshold.
pub fn estimate_input(ctrl: &ControlParams, u: f64) -> f64 {
    deadband(ctrl.threshold, u) - u
}

/// Closed-loop derivative written row by row from the coefficients.
pub fn closed_loop_derivative(coeffs: &Coefficients, params: &Params, state: &State, u: f64) -> State {
    let Coefficients { a1, a2, a3, a4, b, inertia } = *coeffs;
    let [x1, x2, x3, x4] = state.to_array();
    let (f, g) = input_nonlinearities(params, u);
    State {
        sway: x2,
        sway_rate: a1 * x1 + a2 * x2 + a3 * x3 + a4 * x4 + f / inertia,
        sway_estimate: b * x1 + x2 - b * x3 - b * x4 + g,
        platform_tilt: u,
    }
}

/// Matrix form: the constant dynamics matrix plus the nonlinear input column.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrices {
    pub a: Matrix4<f64>,
    coeffs: Coefficients,
    params: Params,
}

impl SystemMatrices {
    /// `B(u) = [0, f(u)/J_B, g(u), u]`.
    pub fn input(&self, u: f64) -> Vector4<f64> {
        let (f, g) = input_nonlinearities(&self.params, u);
        Vector4::new(0.0, f / self.coeffs.inertia, g, u)
    }

    pub fn derivative(&self, x: &Vector4<f64>, u: f64) -> Vector4<f64> {
        self.a * x + self.input(u)
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coeffs
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Same system with `A` multiplied by `k`; the input map is unchanged.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            a: self.a * k,
            ..self.clone()
        }
    }
}

pub fn build_matrices(coeffs: &Coefficients, params: &Params) -> SystemMatrices {
    let Coefficients { a1, a2, a3, a4, b, .. } = *coeffs;
    #[rustfmt::skip]
    let a = Matrix4::new(
        0.0, 1.0, 0.0, 0.0,
        a1,  a2,  a3,  a4,
        b,   1.0, -b,  -b,
        0.0, 0.0, 0.0, 0.0,
    );
    SystemMatrices {
        a,
        coeffs: *coeffs,
        params: *params,
    }
}

/// Convenience: coefficients and matrices straight from parameters.
pub fn system(params: &Params) -> SystemMatrices {
    build_matrices(&build_coefficients(params), params)
}

impl From<State> for Vector4<f64> {
    fn from(s: State) -> Self {
        Vector4::from(s.to_array())
    }
}

impl From<Vector4<f64>> for State {
    fn from(v: Vector4<f64>) -> Self {
        State::new(v[0], v[1], v[2], v[3])
    }
}

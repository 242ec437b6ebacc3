//! Stability of the closed loop.
//!
//! Because the platform-tilt row of `A` is zero, `A` always has the eigenvalue
//! 0 and its remaining spectrum is that of the upper-left 3×3 block. The gain
//! conditions below act on the characteristic cubic of that block. The input
//! nonlinearity lives entirely in `B(u)`, so none of this depends on the
//! dead-band threshold.

mod cubic;
mod expm;

use std::fmt;

use nalgebra::{Complex, Matrix3, Matrix4, Vector4};

pub use self::cubic::{cubic_roots, Cubic};
pub use self::expm::{discretize, expm, matrix_exponential};
use crate::error::{DegenerateError, SimError};
use crate::model::{Params, State};
use crate::simulate::Trajectory;
use crate::statespace::{Coefficients, SystemMatrices};

/// Real parts with magnitude below this count as lying on the imaginary axis.
pub const IMAGINARY_AXIS_TOL: f64 = 1e-9;

/// `[c2, c1, c0]` of `λ³ + c2λ² + c1λ + c0`.
pub fn characteristic_cubic(coeffs: &Coefficients) -> Cubic {
    let Coefficients { a1, a2, a3, b, .. } = *coeffs;
    [b - a2, -a3 - a2 * b - a1, -b * (a1 + a3)]
}

/// Characteristic cubic of the upper-left 3×3 block of `a`, read off its
/// trace, principal minors and determinant.
pub fn cubic_from_matrix(a: &Matrix4<f64>) -> Cubic {
    let m: Matrix3<f64> = a.fixed_view::<3, 3>(0, 0).into_owned();
    let minors = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
        + m[(0, 0)] * m[(2, 2)] - m[(0, 2)] * m[(2, 0)]
        + m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)];
    [-m.trace(), minors, -m.determinant()]
}

/// One gain inequality `lhs < rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inequality {
    pub lhs: f64,
    pub rhs: f64,
}

impl Inequality {
    pub fn holds(&self) -> bool {
        self.lhs < self.rhs
    }

    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// The three sufficient gain conditions on `(Kp_a, Kd_a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainConditions {
    /// `Kd_a < c_L·J_B - Kd_p`
    pub damping: Inequality,
    /// `Kp_a + c_L·Kd_a < K_G - m·g·h_B - Kp_p - c_L·Kd_p`
    pub mixed: Inequality,
    /// `Kp_a < K_G - m·g·h_B - Kp_p`
    pub stiffness: Inequality,
}

impl GainConditions {
    pub fn flags(&self) -> [bool; 3] {
        [self.damping.holds(), self.mixed.holds(), self.stiffness.holds()]
    }

    pub fn all_hold(&self) -> bool {
        self.flags().iter().all(|&f| f)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Inequality> {
        [&self.damping, &self.mixed, &self.stiffness].into_iter()
    }
}

pub fn lemma1_check(params: &Params) -> GainConditions {
    let Params { plant, ctrl } = params;
    let c = ctrl.leak_rate;
    let residual = params.gravity_gain() - plant.gravity_stiffness() - plant.passive_stiffness;
    GainConditions {
        damping: Inequality {
            lhs: ctrl.kd,
            rhs: c * plant.inertia - plant.passive_damping,
        },
        mixed: Inequality {
            lhs: ctrl.kp + ctrl.kd * c,
            rhs: residual - c * plant.passive_damping,
        },
        stiffness: Inequality {
            lhs: ctrl.kp,
            rhs: residual,
        },
    }
}

/// Hurwitz margins of a monic cubic: `c2`, `c0` and `c2·c1 - c0`.
pub fn routh_margins(cubic: &Cubic) -> [f64; 3] {
    let [c2, c1, c0] = *cubic;
    [c2, c0, c2 * c1 - c0]
}

/// True iff every root of the cubic lies in the open left half-plane.
pub fn routh_check(cubic: &Cubic) -> bool {
    routh_margins(cubic).iter().all(|&m| m > 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    AsymptoticallyStable,
    LyapunovStable,
    Unstable,
}

impl Classification {
    pub fn is_stable(self) -> bool {
        !matches!(self, Classification::Unstable)
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::AsymptoticallyStable => "AsymptoticallyStable",
            Classification::LyapunovStable => "LyapunovStable",
            Classification::Unstable => "Unstable",
        })
    }
}

/// Eigenvalues of `a`, sorted by descending real part.
pub fn eigenvalues(a: &Matrix4<f64>) -> [Complex<f64>; 4] {
    let ev = a.complex_eigenvalues();
    let mut out = [ev[0], ev[1], ev[2], ev[3]];
    out.sort_by(|x, y| y.re.total_cmp(&x.re).then(x.im.total_cmp(&y.im)));
    out
}

/// Dimension of the null space of `a - λI`.
fn geometric_multiplicity(a: &Matrix4<f64>, lambda: Complex<f64>) -> usize {
    let shifted = a.map(|v| Complex::new(v, 0.0)) - Matrix4::<Complex<f64>>::identity() * lambda;
    let sv = shifted.singular_values();
    let scale = sv.max().max(1.0);
    sv.iter().filter(|&&s| s <= 1e-8 * scale).count()
}

/// Classifies the linear part `x' = A x`.
///
/// Fails when the zero eigenvalue is repeated (`c0 = 0`), which the gain
/// conditions exclude and which would need a rank test to settle.
pub fn classify(matrices: &SystemMatrices) -> Result<Classification, DegenerateError> {
    let a = &matrices.a;
    let cubic = cubic_from_matrix(a);
    let c0 = cubic[2];
    if c0 == 0.0 || c0.abs() <= f64::EPSILON * (cubic[0].abs().powi(3) + cubic[1].abs().powf(1.5)) {
        return Err(DegenerateError { c0 });
    }

    let ev = eigenvalues(a);
    if ev.iter().any(|z| z.re > IMAGINARY_AXIS_TOL) {
        return Ok(Classification::Unstable);
    }
    if ev.iter().all(|z| z.re < -IMAGINARY_AXIS_TOL) {
        return Ok(Classification::AsymptoticallyStable);
    }

    let on_axis: Vec<_> = ev.iter().filter(|z| z.re.abs() <= IMAGINARY_AXIS_TOL).collect();
    for z in &on_axis {
        let algebraic = on_axis
            .iter()
            .filter(|w| (**w - **z).norm() <= 1e-6 * (1.0 + z.norm()))
            .count();
        if algebraic > 1 && geometric_multiplicity(a, **z) < algebraic {
            return Ok(Classification::Unstable);
        }
    }
    Ok(Classification::LyapunovStable)
}

/// Everything `check` reports about one parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub conditions: GainConditions,
    pub routh_ok: bool,
    pub cubic: Cubic,
    pub eigenvalues: [Complex<f64>; 4],
    pub classification: Result<Classification, DegenerateError>,
}

impl StabilityReport {
    pub fn lemma1_flags(&self) -> [bool; 3] {
        self.conditions.flags()
    }
}

pub fn analyze(params: &Params) -> StabilityReport {
    let matrices = crate::statespace::system(params);
    let cubic = characteristic_cubic(matrices.coefficients());
    StabilityReport {
        conditions: lemma1_check(params),
        routh_ok: routh_check(&cubic),
        cubic,
        eigenvalues: eigenvalues(&matrices.a),
        classification: classify(&matrices),
    }
}

/// Exact response to a zero-order-held input.
///
/// Each step applies `x ← Φ x + Γ B(u_k)` with `Φ = exp(A h)` and
/// `Γ = ∫₀ʰ exp(A τ) dτ`, both from one block-matrix exponential.
/// The returned trajectory has `u_samples.len() + 1` samples.
pub fn zoh_solution(
    matrices: &SystemMatrices,
    x0: State,
    u_samples: &[f64],
    h: f64,
) -> Result<Trajectory, SimError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(SimError::InvalidStep(h));
    }
    if u_samples.is_empty() {
        return Err(SimError::EmptyInput);
    }
    let (phi, gamma) = discretize(&matrices.a, h);

    let mut states = Vec::with_capacity(u_samples.len() + 1);
    let mut inputs = Vec::with_capacity(u_samples.len() + 1);
    let mut x: Vector4<f64> = x0.into();
    states.push(x0);
    for &u in u_samples {
        x = phi * x + gamma * matrices.input(u);
        states.push(x.into());
        inputs.push(u);
    }
    inputs.push(*u_samples.last().unwrap());

    Ok(Trajectory::from_states(matrices.params(), h, states, inputs))
}

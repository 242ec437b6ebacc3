//! CSV and key-value text emitted by the commands.
//!
//! Floats are written with 17 significant digits so every value round-trips
//! exactly; lines end with a bare LF.

use std::fmt::Write as _;

use nalgebra::Complex;

use crate::analysis::{GainCurve, RegionMap};
use crate::error::AnalysisError;
use crate::stability::{GainConditions, StabilityReport};
use crate::simulate::Trajectory;

pub const TRAJECTORY_HEADER: &str = "t,x1,x2,x3,x4,u,alpha_BF,alpha_FS_hat,epsilon,T_a,T_p,T_G";

/// 17 significant digits in scientific notation.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut s = String::with_capacity(traj.len() * 300);
    s.push_str(TRAJECTORY_HEADER);
    s.push('\n');
    for ((t, x), sig) in traj.times.iter().zip(&traj.states).zip(&traj.signals) {
        let row = [
            *t,
            x.sway,
            x.sway_rate,
            x.sway_estimate,
            x.platform_tilt,
            sig.u,
            sig.ankle_angle,
            sig.tilt_estimate,
            sig.error,
            sig.active_torque,
            sig.passive_torque,
            sig.gravity_torque,
        ];
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&fmt_f64(*v));
        }
        s.push('\n');
    }
    s
}

pub fn gain_curve_csv(curve: &GainCurve) -> String {
    let mut s = String::from("amplitude,gain,regime\n");
    for ((a, g), r) in curve.amplitudes.iter().zip(&curve.gains).zip(&curve.regimes) {
        writeln!(s, "{},{},{}", fmt_f64(*a), fmt_f64(*g), r).unwrap();
    }
    s
}

/// Sweep rows where failed points stay in place, flagged `undefined`.
pub fn sweep_rows_csv(threshold: f64, amplitudes: &[f64], points: &[Result<f64, AnalysisError>]) -> String {
    let gains: Vec<f64> = points.iter().map(|p| *p.as_ref().unwrap_or(&f64::NAN)).collect();
    let regimes = crate::analysis::label_regimes(threshold, amplitudes, &gains);
    let mut s = String::from("amplitude,gain,regime\n");
    for ((a, p), r) in amplitudes.iter().zip(points).zip(regimes) {
        match p {
            Ok(g) => writeln!(s, "{},{},{}", fmt_f64(*a), fmt_f64(*g), r),
            Err(_) => writeln!(s, "{},NaN,undefined", fmt_f64(*a)),
        }
        .unwrap();
    }
    s
}

pub fn region_csv(map: &RegionMap) -> String {
    let mut s = String::from("Kp_a,Kd_a,lemma1,routh,numeric\n");
    for p in &map.points {
        writeln!(s, "{},{},{},{},{}", fmt_f64(p.kp), fmt_f64(p.kd), p.lemma1, p.routh, p.numeric).unwrap();
    }
    s
}

fn fmt_complex(z: &Complex<f64>) -> String {
    if z.im == 0.0 {
        format!("{:.6}", z.re)
    } else {
        format!("{:.6}{:+.6}i", z.re, z.im)
    }
}

const CONDITION_LABELS: [&str; 3] = [
    "Kd_a < c_L*J_B - Kd_p",
    "Kp_a + c_L*Kd_a < K_G - m*g*h_B - Kp_p - c_L*Kd_p",
    "Kp_a < K_G - m*g*h_B - Kp_p",
];

fn condition_lines(s: &mut String, conditions: &GainConditions) {
    for (label, ineq) in CONDITION_LABELS.iter().zip(conditions.iter()) {
        writeln!(
            s,
            "  {label:<50} {:>14.6} < {:<14.6} {}",
            ineq.lhs,
            ineq.rhs,
            ineq.holds()
        )
        .unwrap();
    }
}

fn classification_name(report: &StabilityReport) -> String {
    match &report.classification {
        Ok(c) => c.to_string(),
        Err(_) => "Degenerate".to_string(),
    }
}

pub fn report_text(report: &StabilityReport) -> String {
    let mut s = String::from("gain conditions:\n");
    condition_lines(&mut s, &report.conditions);
    let [c2, c1, c0] = report.cubic;
    writeln!(s, "characteristic cubic: l^3 {c2:+.6} l^2 {c1:+.6} l {c0:+.6}").unwrap();
    writeln!(s, "routh-hurwitz: {}", report.routh_ok).unwrap();
    let ev: Vec<_> = report.eigenvalues.iter().map(fmt_complex).collect();
    writeln!(s, "eigenvalues: {}", ev.join(", ")).unwrap();
    if let Err(e) = &report.classification {
        writeln!(s, "diagnostic: {e}").unwrap();
    }
    writeln!(s, "classification: {}", classification_name(report)).unwrap();
    s
}

/// Machine-readable report in the same flat `key = value` form as configs.
pub fn report_kv(report: &StabilityReport) -> String {
    let mut s = String::new();
    for (i, ineq) in report.conditions.iter().enumerate() {
        writeln!(s, "lemma1_{} = {}", i + 1, ineq.holds()).unwrap();
        writeln!(s, "lemma1_{}_lhs = {}", i + 1, fmt_f64(ineq.lhs)).unwrap();
        writeln!(s, "lemma1_{}_rhs = {}", i + 1, fmt_f64(ineq.rhs)).unwrap();
    }
    for (name, v) in ["c2", "c1", "c0"].iter().zip(report.cubic) {
        writeln!(s, "{name} = {}", fmt_f64(v)).unwrap();
    }
    writeln!(s, "routh = {}", report.routh_ok).unwrap();
    for (i, z) in report.eigenvalues.iter().enumerate() {
        writeln!(s, "eig{i}_re = {}", fmt_f64(z.re)).unwrap();
        writeln!(s, "eig{i}_im = {}", fmt_f64(z.im)).unwrap();
    }
    writeln!(s, "classification = {}", classification_name(report)).unwrap();
    s
}

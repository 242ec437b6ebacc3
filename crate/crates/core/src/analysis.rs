//! Experiment orchestration and post-processing: peak-to-peak gain, the
//! amplitude sweep, the steady-state lean and the gain-plane stability map.
//!
//! Sweep points and grid points are independent, so both fan out over a rayon
//! pool. `DEC_SIM_THREADS` caps the pool size; results always come back in
//! input order.

use std::fmt;

use rayon::prelude::*;

use crate::error::AnalysisError;
use crate::model::Params;
use crate::simulate::{rk4_integrate, InputSignal, SimOptions, Trajectory};
use crate::stability::{characteristic_cubic, eigenvalues, lemma1_check, routh_check, routh_margins};
use crate::statespace::{build_coefficients, build_matrices};

/// Environment variable that caps sweep and region parallelism.
pub const THREADS_ENV: &str = "DEC_SIM_THREADS";

/// Consecutive gains closer than this (relative) are labelled asymptotic.
pub const ASYMPTOTE_REL_CHANGE: f64 = 0.02;

/// Runs `f` on a pool sized by `DEC_SIM_THREADS`, or on the global pool when
/// the variable is unset or unparsable.
pub fn with_thread_cap<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    let cap = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0);
    match cap.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

fn peak_to_peak(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    hi - lo
}

/// `pp(sway) / pp(platform tilt)` over the samples left after dropping the
/// leading `discard_fraction` of the run.
pub fn peak_to_peak_gain(traj: &Trajectory, discard_fraction: f64) -> Result<f64, AnalysisError> {
    if !(0.0..1.0).contains(&discard_fraction) {
        return Err(AnalysisError::InvalidDiscard(discard_fraction));
    }
    let start = (discard_fraction * traj.len() as f64).floor() as usize;
    let tail = &traj.states[start.min(traj.len())..];
    let input_pp = peak_to_peak(tail.iter().map(|s| s.platform_tilt));
    if !(input_pp > 0.0) {
        return Err(AnalysisError::UndefinedGain);
    }
    Ok(peak_to_peak(tail.iter().map(|s| s.sway)) / input_pp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// The input never leaves the dead band.
    Plateau,
    Transition,
    /// Gain has settled to within [`ASYMPTOTE_REL_CHANGE`] of its predecessor.
    Asymptote,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Plateau => "plateau",
            Regime::Transition => "transition",
            Regime::Asymptote => "asymptote",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainCurve {
    pub omega: f64,
    pub amplitudes: Vec<f64>,
    pub gains: Vec<f64>,
    pub regimes: Vec<Regime>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub sim: SimOptions,
    pub discard_fraction: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            sim: SimOptions {
                t_end: Some(20.0),
                ..Default::default()
            },
            discard_fraction: 0.5,
        }
    }
}

/// `n` logarithmically spaced values from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        hi
                    } else {
                        10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64)
                    }
                })
                .collect()
        }
    }
}

/// The default sweep: 25 amplitudes in [1e-4, 1] rad/s.
pub fn default_amplitudes() -> Vec<f64> {
    log_spaced(1e-4, 1.0, 25)
}

/// Gain of a single sinusoidal run starting from rest.
pub fn sinusoid_gain(params: &Params, amplitude: f64, omega: f64, opts: &SweepOptions) -> Result<f64, AnalysisError> {
    let traj = rk4_integrate(
        opts.sim.path,
        params,
        Default::default(),
        &InputSignal::cosine(amplitude, omega),
        opts.sim.t_end.unwrap_or(20.0),
        opts.sim.step,
    )?;
    peak_to_peak_gain(&traj, opts.discard_fraction)
}

/// Assigns a regime to every point of an amplitude/gain series.
pub fn label_regimes(threshold: f64, amplitudes: &[f64], gains: &[f64]) -> Vec<Regime> {
    (0..amplitudes.len())
        .map(|i| {
            if amplitudes[i] < threshold {
                Regime::Plateau
            } else if i > 0 && ((gains[i] - gains[i - 1]) / gains[i - 1]).abs() < ASYMPTOTE_REL_CHANGE {
                Regime::Asymptote
            } else {
                Regime::Transition
            }
        })
        .collect()
}

/// Per-amplitude gains; a failed point is kept as an error in its slot.
pub fn sweep_gain_points(
    params: &Params,
    amplitudes: &[f64],
    omega: f64,
    opts: &SweepOptions,
) -> Result<Vec<Result<f64, AnalysisError>>, AnalysisError> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(AnalysisError::InvalidFrequency(omega));
    }
    if amplitudes.iter().any(|&a| !(a > 0.0 && a.is_finite())) || amplitudes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(AnalysisError::InvalidAmplitudes);
    }
    Ok(with_thread_cap(|| {
        amplitudes
            .par_iter()
            .map(|&a| sinusoid_gain(params, a, omega, opts))
            .collect()
    }))
}

pub fn sweep_gain(params: &Params, amplitudes: &[f64], omega: f64, opts: &SweepOptions) -> Result<GainCurve, AnalysisError> {
    let gains = sweep_gain_points(params, amplitudes, omega, opts)?
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GainCurve {
        omega,
        amplitudes: amplitudes.to_vec(),
        regimes: label_regimes(params.ctrl.threshold, amplitudes, &gains),
        gains,
    })
}

/// Fixed point of the sway for a platform held at `tilt` with `u = 0`.
///
/// Row 3 forces `x3 = x1 - x4` and row 2 then gives
/// `x1 = x4·(Kp_a + Kp_p) / (Kp_a + Kp_p + m·g·h_B - K_G)`. Only meaningful
/// for stable gains.
pub fn steady_state_lean(params: &Params, tilt: f64) -> Result<f64, AnalysisError> {
    let Params { plant, ctrl } = params;
    let numer = ctrl.kp + plant.passive_stiffness;
    let denom = numer + plant.gravity_stiffness() - params.gravity_gain();
    if denom == 0.0 {
        return Err(AnalysisError::Singular);
    }
    Ok(tilt * numer / denom)
}

/// Inclusive linear grid axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridAxis {
    pub fn new(lo: f64, hi: f64, n: usize) -> Self {
        Self { lo, hi, n }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                if i + 1 == self.n {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionPoint {
    pub kp: f64,
    pub kd: f64,
    pub lemma1: bool,
    pub routh: bool,
    pub numeric: bool,
    /// Smallest absolute Hurwitz margin; near zero means a boundary point.
    pub routh_margin: f64,
}

/// Verdicts over a rectangular `(Kp_a, Kd_a)` grid, Kd-major then Kp.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMap {
    pub kp_axis: GridAxis,
    pub kd_axis: GridAxis,
    pub points: Vec<RegionPoint>,
}

impl RegionMap {
    /// Points where the gain conditions and the Hurwitz test disagree.
    pub fn lemma1_routh_disagreements(&self) -> usize {
        self.points.iter().filter(|p| p.lemma1 != p.routh).count()
    }

    /// Points where the gain conditions pass but the cubic is not Hurwitz.
    pub fn lemma1_only(&self) -> usize {
        self.points.iter().filter(|p| p.lemma1 && !p.routh).count()
    }

    pub fn routh_numeric_disagreements(&self, min_margin: f64) -> usize {
        self.points
            .iter()
            .filter(|p| p.routh_margin > min_margin && p.routh != p.numeric)
            .count()
    }
}

pub fn region_point(params: &Params, kp: f64, kd: f64) -> RegionPoint {
    let p = params.with_gains(kp, kd);
    let coeffs = build_coefficients(&p);
    let cubic = characteristic_cubic(&coeffs);
    // Drop the structural zero contributed by the platform row.
    let mut ev = eigenvalues(&build_matrices(&coeffs, &p).a).to_vec();
    let origin = (0..ev.len())
        .min_by(|&i, &j| ev[i].norm().total_cmp(&ev[j].norm()))
        .unwrap_or(0);
    ev.remove(origin);
    RegionPoint {
        kp,
        kd,
        lemma1: lemma1_check(&p).all_hold(),
        routh: routh_check(&cubic),
        numeric: ev.iter().all(|z| z.re < -1e-9),
        routh_margin: routh_margins(&cubic).iter().map(|m| m.abs()).fold(f64::INFINITY, f64::min),
    }
}

pub fn stability_region(params: &Params, kp_axis: GridAxis, kd_axis: GridAxis) -> Result<RegionMap, AnalysisError> {
    let finite = |a: &GridAxis| a.lo.is_finite() && a.hi.is_finite();
    if kp_axis.n < 2 || kd_axis.n < 2 || !finite(&kp_axis) || !finite(&kd_axis) {
        return Err(AnalysisError::InvalidGrid);
    }
    let kps = kp_axis.values();
    let grid: Vec<(f64, f64)> = kd_axis
        .values()
        .into_iter()
        .flat_map(|kd| kps.iter().map(move |&kp| (kp, kd)))
        .collect();
    let points = with_thread_cap(|| grid.par_iter().map(|&(kp, kd)| region_point(params, kp, kd)).collect());
    Ok(RegionMap {
        kp_axis,
        kd_axis,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::State;

    fn traj_from(states: Vec<State>) -> Trajectory {
        let n = states.len();
        Trajectory::from_states(&Params::default(), 0.1, states, vec![0.0; n])
    }

    #[test]
    fn gain_of_rigid_follower_is_one() {
        let states = (0..100)
            .map(|k| {
                let x = (k as f64 * 0.3).sin();
                State::new(x, 0.0, 0.0, x)
            })
            .collect();
        assert!((peak_to_peak_gain(&traj_from(states), 0.5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gain_of_perfect_rejection_is_zero() {
        let states = (0..100).map(|k| State::new(0.0, 0.0, 0.0, (k as f64).sin())).collect();
        assert_eq!(peak_to_peak_gain(&traj_from(states), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn gain_undefined_without_platform_motion() {
        let states = vec![State::new(1.0, 0.0, 0.0, 0.2); 10];
        assert_eq!(peak_to_peak_gain(&traj_from(states), 0.5), Err(AnalysisError::UndefinedGain));
        let states = vec![State::ZERO; 10];
        assert_eq!(peak_to_peak_gain(&traj_from(states), 1.0), Err(AnalysisError::InvalidDiscard(1.0)));
    }

    #[test]
    fn regime_labels() {
        let labels = label_regimes(0.01, &[0.001, 0.005, 0.02, 0.1, 0.5], &[0.8, 0.8, 0.4, 0.2, 0.199]);
        assert_eq!(
            labels,
            [Regime::Plateau, Regime::Plateau, Regime::Transition, Regime::Transition, Regime::Asymptote]
        );
    }

    #[test]
    fn log_spacing_endpoints() {
        let v = log_spaced(1e-4, 1.0, 25);
        assert_eq!(v.len(), 25);
        assert!((v[0] - 1e-4).abs() < 1e-19);
        assert_eq!(v[24], 1.0);
        assert!((v[6] - 1e-3).abs() < 1e-15);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn sweep_rejects_bad_input() {
        let p = Params::default();
        let o = SweepOptions::default();
        assert_eq!(sweep_gain(&p, &[0.1, 0.05], 10.0, &o), Err(AnalysisError::InvalidAmplitudes));
        assert_eq!(sweep_gain(&p, &[0.0, 0.05], 10.0, &o), Err(AnalysisError::InvalidAmplitudes));
        assert_eq!(sweep_gain(&p, &[0.1], 0.0, &o), Err(AnalysisError::InvalidFrequency(0.0)));
    }

    #[test]
    fn steady_lean_values() {
        let p = Params::default();
        assert_eq!(steady_state_lean(&p, 0.0).unwrap(), 0.0);
        let lean = steady_state_lean(&p, std::f64::consts::PI / 15.0).unwrap();
        assert!((lean - 0.2423).abs() < 1e-4);
    }

    #[test]
    fn steady_lean_singular() {
        let p = Params::default();
        // Kp_a + Kp_p + m g h_B - K_G = 0
        let kp = p.gravity_gain() - p.plant.gravity_stiffness() - p.plant.passive_stiffness;
        assert_eq!(steady_state_lean(&p.with_gains(kp, -1000.0), 0.1), Err(AnalysisError::Singular));
    }

    #[test]
    fn steady_lean_ratio_moves_towards_one_with_more_compensation() {
        // the ratio approaches 1 from above for the designed gains
        let mut last = f64::INFINITY;
        for kg in [0.5, 0.6, 0.7, 0.8, 0.9, 1.0] {
            let mut p = Params::default();
            p.ctrl.gravity_fraction = kg;
            let ratio = steady_state_lean(&p, 1.0).unwrap();
            assert!(ratio < last && ratio >= 1.0, "Kg = {kg}: {ratio}");
            last = ratio;
        }
        assert_eq!(last, 1.0);
    }

    #[test]
    fn region_corner_points() {
        let p = Params::default();
        let designed = region_point(&p, -1200.0, -1000.0);
        assert!(designed.lemma1 && designed.routh && designed.numeric);
        let open = region_point(&p, 0.0, 0.0);
        assert!(!open.lemma1 && !open.routh && !open.numeric);
    }

    #[test]
    fn region_grid_shape() {
        let map = stability_region(&Params::default(), GridAxis::new(-3000.0, 500.0, 4), GridAxis::new(-3000.0, 500.0, 3)).unwrap();
        assert_eq!(map.points.len(), 12);
        assert_eq!(map.points[1].kp, map.points[0].kp + 3500.0 / 3.0);
        assert_eq!(map.points[4].kd, -3000.0 + 1750.0);
        assert!(stability_region(&Params::default(), GridAxis::new(0.0, 1.0, 1), GridAxis::new(0.0, 1.0, 2)).is_err());
    }
}

//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, keys are case-sensitive.
//! Every key is optional; missing keys keep the defaults of [`RunConfig`].

use std::fmt::Write as _;
use std::path::PathBuf;

use thiserror::Error;

use crate::error::ValidationError;
use crate::model::{self, Params, State};
use crate::simulate::{Condition, InputSignal, DEFAULT_STEP};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: invalid value `{value}` for `{key}`")]
    BadValue { line: usize, key: String, value: String },
    #[error("{0}")]
    Setting(String),
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

/// Which experiment `simulate` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Preset(Condition),
    /// Initial state and input taken from the config.
    Custom,
}

impl Experiment {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "custom" => Some(Experiment::Custom),
            n => n.parse().ok().and_then(Condition::from_number).map(Experiment::Preset),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Experiment::Preset(Condition::LevelFree) => "1",
            Experiment::Preset(Condition::TiltedFree) => "2",
            Experiment::Preset(Condition::Sinusoidal) => "3",
            Experiment::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: Params,
    pub step: f64,
    /// Duration override; presets use their own default when unset.
    pub t_end: Option<f64>,
    pub experiment: Experiment,
    /// Input of the custom experiment.
    pub input: InputSignal,
    /// Initial state of the custom experiment.
    pub initial_state: State,
    pub sweep_omega: f64,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: Params::default(),
            step: DEFAULT_STEP,
            t_end: None,
            experiment: Experiment::Preset(Condition::LevelFree),
            input: InputSignal::Zero,
            initial_state: State::ZERO,
            sweep_omega: 10.0,
            out: None,
        }
    }
}

const KEYS: &[&str] = &[
    "J_B", "m", "g", "h_B", "Kp_p", "Kd_p", "Kp_a", "Kd_a", "Kg", "c_L", "theta", "alpha_ref", "step", "t_end",
    "condition", "input", "u0", "amplitude", "omega", "phase", "x1_0", "x2_0", "x3_0", "x4_0", "sweep_omega", "out",
];

/// Plain decimal with optional sign, fraction and exponent. Rejects `inf`,
/// `nan` and hexadecimal forms that `f64::from_str` would accept.
fn parse_number(s: &str) -> Option<f64> {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let mut parts = mantissa.splitn(2, '.');
    let int = parts.next().unwrap_or("");
    let frac = parts.next().unwrap_or("");
    let digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    if int.is_empty() && frac.is_empty() || !digits(int) || !digits(frac) {
        return None;
    }
    if let Some(e) = exponent {
        let e = e.strip_prefix(['+', '-']).unwrap_or(e);
        if e.is_empty() || !digits(e) {
            return None;
        }
    }
    s.parse().ok().filter(|v: &f64| v.is_finite())
}

#[derive(Default)]
struct InputSpec {
    kind: Option<String>,
    u0: f64,
    amplitude: Option<f64>,
    omega: Option<f64>,
    phase: f64,
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut seen = Vec::new();
    let mut input = InputSpec::default();
    let (mut plant, mut ctrl) = (cfg.params.plant, cfg.params.ctrl);
    let mut x0 = cfg.initial_state.to_array();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            text: content.to_string(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            });
        }
        if seen.contains(&key) {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
        seen.push(key);

        let bad = || ConfigError::BadValue {
            line,
            key: key.to_string(),
            value: value.to_string(),
        };
        let num = || parse_number(value).ok_or_else(bad);

        match key {
            "J_B" => plant.inertia = num()?,
            "m" => plant.mass = num()?,
            "g" => plant.gravity = num()?,
            "h_B" => plant.com_height = num()?,
            "Kp_p" => plant.passive_stiffness = num()?,
            "Kd_p" => plant.passive_damping = num()?,
            "Kp_a" => ctrl.kp = num()?,
            "Kd_a" => ctrl.kd = num()?,
            "Kg" => ctrl.gravity_fraction = num()?,
            "c_L" => ctrl.leak_rate = num()?,
            "theta" => ctrl.threshold = num()?,
            "alpha_ref" => ctrl.alpha_ref = num()?,
            "step" => cfg.step = num()?,
            "t_end" => cfg.t_end = Some(num()?),
            "condition" => cfg.experiment = Experiment::parse(value).ok_or_else(bad)?,
            "input" => match value {
                "zero" | "constant" | "sinusoid" => input.kind = Some(value.to_string()),
                _ => return Err(bad()),
            },
            "u0" => input.u0 = num()?,
            "amplitude" => input.amplitude = Some(num()?),
            "omega" => input.omega = Some(num()?),
            "phase" => input.phase = num()?,
            "x1_0" => x0[0] = num()?,
            "x2_0" => x0[1] = num()?,
            "x3_0" => x0[2] = num()?,
            "x4_0" => x0[3] = num()?,
            "sweep_omega" => cfg.sweep_omega = num()?,
            "out" => cfg.out = Some(PathBuf::from(value)),
            _ => unreachable!("key list and match arms disagree"),
        }
    }

    cfg.params = model::validate(plant, ctrl)?;
    cfg.initial_state = State::from_array(x0);
    cfg.input = match input.kind.as_deref() {
        None | Some("zero") => InputSignal::Zero,
        Some("constant") => InputSignal::Constant(input.u0),
        _ => InputSignal::Sinusoid {
            amplitude: input.amplitude.unwrap_or(0.1),
            omega: input.omega.unwrap_or(10.0),
            phase: input.phase,
        },
    };
    check_settings(&cfg)?;
    Ok(cfg)
}

fn check_settings(cfg: &RunConfig) -> Result<(), ConfigError> {
    if !(cfg.step > 0.0) {
        return Err(ConfigError::Setting(format!("step must be positive, got {}", cfg.step)));
    }
    if let Some(t) = cfg.t_end {
        if !(t >= cfg.step) {
            return Err(ConfigError::Setting(format!("t_end must be at least one step, got {t}")));
        }
    }
    if let InputSignal::Sinusoid { amplitude, omega, .. } = cfg.input {
        if amplitude < 0.0 || !(omega > 0.0) {
            return Err(ConfigError::Setting(
                "sinusoid needs amplitude >= 0 and omega > 0".to_string(),
            ));
        }
    }
    if !(cfg.sweep_omega > 0.0) {
        return Err(ConfigError::Setting("sweep_omega must be positive".to_string()));
    }
    Ok(())
}

/// Serialises a config so that [`parse_config`] restores it exactly.
pub fn to_config_string(cfg: &RunConfig) -> String {
    let Params { plant, ctrl } = cfg.params;
    let mut s = String::new();
    let mut put = |k: &str, v: f64| writeln!(s, "{k} = {v:?}").unwrap();
    put("J_B", plant.inertia);
    put("m", plant.mass);
    put("g", plant.gravity);
    put("h_B", plant.com_height);
    put("Kp_p", plant.passive_stiffness);
    put("Kd_p", plant.passive_damping);
    put("Kp_a", ctrl.kp);
    put("Kd_a", ctrl.kd);
    put("Kg", ctrl.gravity_fraction);
    put("c_L", ctrl.leak_rate);
    put("theta", ctrl.threshold);
    put("alpha_ref", ctrl.alpha_ref);
    put("step", cfg.step);
    if let Some(t) = cfg.t_end {
        put("t_end", t);
    }
    let x0 = cfg.initial_state.to_array();
    for (i, v) in x0.iter().enumerate() {
        put(&format!("x{}_0", i + 1), *v);
    }
    put("sweep_omega", cfg.sweep_omega);
    match cfg.input {
        InputSignal::Zero => writeln!(s, "input = zero").unwrap(),
        InputSignal::Constant(u) => {
            writeln!(s, "input = constant\nu0 = {u:?}").unwrap();
        }
        InputSignal::Sinusoid { amplitude, omega, phase } => {
            writeln!(s, "input = sinusoid\namplitude = {amplitude:?}\nomega = {omega:?}\nphase = {phase:?}").unwrap();
        }
    }
    writeln!(s, "condition = {}", cfg.experiment.name()).unwrap();
    if let Some(out) = &cfg.out {
        writeln!(s, "out = {}", out.display()).unwrap();
    }
    s
}

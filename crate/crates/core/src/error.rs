use std::fmt;

use thiserror::Error;

use crate::model::Violation;

/// One or more parameter bounds were violated.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ValidationError {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid parameters: ")?;
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("duration {t_end} s is shorter than one step of {step} s")]
    InvalidDuration { t_end: f64, step: f64 },
    #[error("state diverged at step {step} (t = {time} s)")]
    Diverged { step: usize, time: f64 },
    #[error("input sample sequence is empty")]
    EmptyInput,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("platform tilt has zero peak-to-peak amplitude; gain is undefined")]
    UndefinedGain,
    #[error("discard fraction must lie in [0, 1), got {0}")]
    InvalidDiscard(f64),
    #[error("amplitudes must be positive and strictly increasing")]
    InvalidAmplitudes,
    #[error("frequency must be positive, got {0}")]
    InvalidFrequency(f64),
    #[error("grid needs at least 2 points per axis")]
    InvalidGrid,
    #[error("singular configuration: steady-state denominator is zero")]
    Singular,
    #[error(transparent)]
    Simulation(#[from] SimError),
}

/// The characteristic cubic has a zero constant term, so the zero eigenvalue
/// is at least double and semisimplicity needs a rank test.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("degenerate system: repeated zero eigenvalue (c0 = {c0})")]
pub struct DegenerateError {
    pub c0: f64,
}

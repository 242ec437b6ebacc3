//! Simulation and stability analysis of a disturbance-estimate-and-compensation
//! (DEC) posture controller balancing a single inverted pendulum on a tilting
//! platform.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: plant and controller parameters, the closed-loop [`State`].
//! - [`blocks`]: the individual blocks of the loop (torques, dead band, leaky
//!   integrator, servo) and their composition into a state derivative.
//! - [`statespace`]: the same loop as `x' = A x + B(u)`.
//! - [`stability`]: characteristic cubic, gain conditions, Hurwitz test,
//!   eigenvalue classification, matrix exponential and exact ZOH solution.
//! - [`simulate`]: fixed-step RK4 and the three reference experiments.
//! - [`analysis`]: peak-to-peak gain, amplitude sweeps, steady lean, and the
//!   gain-plane stability map.
//! - [`cli`]: flat config files, CSV/SVG output and the `dec-sim` commands.
//!
//! ```
//! use dec_sim::{model::Params, stability};
//!
//! let report = stability::analyze(&Params::default());
//! assert_eq!(report.classification, Ok(stability::Classification::LyapunovStable));
//! ```

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod blocks;
pub mod cli;
pub mod error;
pub mod model;
pub mod simulate;
pub mod stability;
pub mod statespace;

pub use error::{AnalysisError, DegenerateError, SimError, ValidationError};
pub use model::{ControlParams, Params, PlantParams, State};
pub use simulate::{Condition, InputSignal, Trajectory};

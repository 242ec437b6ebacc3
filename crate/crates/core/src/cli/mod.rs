//! The `dec-sim` command line.
//!
//! Exit codes: 0 success, 1 analysis-negative (unstable system, divergence,
//! unwritable output), 2 usage or configuration error.

pub mod config;
pub mod output;
pub mod svg;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

pub use self::config::{parse_config, to_config_string, ConfigError, Experiment, RunConfig};
use crate::analysis::{self, GridAxis, SweepOptions};
use crate::simulate::{rk4_integrate, DerivativePath, SimOptions};
use crate::stability;

#[derive(Debug, Parser)]
#[command(name = "dec-sim", version, about = "DEC posture-control simulation and stability analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathArg {
    Blocks,
    Statespace,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a preset condition (1, 2, 3) or a custom run, writing CSV
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// 1, 2, 3 or custom
        #[arg(long)]
        condition: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "t-end")]
        t_end: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        /// Derivative route to integrate
        #[arg(long, value_enum, default_value = "statespace")]
        path: PathArg,
    },
    /// Print the gain conditions, Hurwitz verdict, eigenvalues and classification
    Check {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also write the report as `key = value` lines
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Peak-to-peak gain against sinusoid amplitude, writing CSV
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        /// LO:HI:N, log spaced
        #[arg(long, default_value = "1e-4:1:25")]
        amps: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "t-end")]
        t_end: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Stability verdicts over a (Kp_a, Kd_a) grid, writing CSV
    Region {
        #[arg(long)]
        config: Option<PathBuf>,
        /// KP_LO:KP_HI:N,KD_LO:KD_HI:N
        #[arg(long, default_value = "-3000:500:50,-3000:500:50", allow_hyphen_values = true)]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Line chart of CSV columns against the first column, as SVG
    Plot {
        /// Input CSV
        csv: PathBuf,
        /// Comma-separated column names; all but the first by default
        #[arg(long)]
        columns: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        title: Option<String>,
        #[arg(long = "log-x")]
        log_x: bool,
    },
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Negative(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Negative(_) => 1,
            CliError::Usage(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Negative(m) => m,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// What a command produced: bytes for `--out` or stdout, and an exit code.
#[derive(Debug)]
pub struct Outcome {
    pub body: String,
    pub out: Option<PathBuf>,
    pub code: u8,
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            Ok(parse_config(&text)?)
        }
    }
}

fn parse_range(s: &str) -> Result<(f64, f64, usize), CliError> {
    let bad = || CliError::Usage(format!("expected LO:HI:N, got `{s}`"));
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite()) || n == 0 {
        return Err(bad());
    }
    Ok((lo, hi, n))
}

fn positive(name: &str, v: Option<f64>) -> Result<Option<f64>, CliError> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(CliError::Usage(format!("--{name} must be positive"))),
        _ => Ok(v),
    }
}

pub fn cmd_simulate(
    cfg: &RunConfig,
    experiment: Experiment,
    t_end: Option<f64>,
    step: Option<f64>,
    path: DerivativePath,
) -> Result<String, CliError> {
    let opts = SimOptions {
        t_end: positive("t-end", t_end)?.or(cfg.t_end),
        step: positive("step", step)?.unwrap_or(cfg.step),
        path,
    };
    let traj = match experiment {
        Experiment::Preset(c) => c.run(&cfg.params, &opts),
        Experiment::Custom => rk4_integrate(
            path,
            &cfg.params,
            cfg.initial_state,
            &cfg.input,
            opts.t_end.unwrap_or(20.0),
            opts.step,
        ),
    };
    match traj {
        Ok(t) => Ok(output::trajectory_csv(&t)),
        Err(e @ crate::SimError::Diverged { .. }) => Err(CliError::Negative(e.to_string())),
        Err(e) => Err(CliError::Usage(e.to_string())),
    }
}

/// Returns the text report, the key-value report and whether the system is stable.
pub fn cmd_check(cfg: &RunConfig) -> (String, String, bool) {
    let report = stability::analyze(&cfg.params);
    let stable = matches!(report.classification, Ok(c) if c.is_stable());
    (output::report_text(&report), output::report_kv(&report), stable)
}

pub fn cmd_sweep(cfg: &RunConfig, amps: &str, t_end: Option<f64>, step: Option<f64>) -> Result<String, CliError> {
    let (lo, hi, n) = parse_range(amps)?;
    if !(lo > 0.0 && hi > lo) && !(n == 1 && lo > 0.0) {
        return Err(CliError::Usage("amplitudes need 0 < LO < HI".to_string()));
    }
    let amplitudes = analysis::log_spaced(lo, hi, n);
    let mut opts = SweepOptions::default();
    opts.sim.t_end = Some(positive("t-end", t_end)?.or(cfg.t_end).unwrap_or(20.0));
    opts.sim.step = positive("step", step)?.unwrap_or(cfg.step);
    let points = analysis::sweep_gain_points(&cfg.params, &amplitudes, cfg.sweep_omega, &opts)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(output::sweep_rows_csv(cfg.params.ctrl.threshold, &amplitudes, &points))
}

pub fn parse_grid(s: &str) -> Result<(GridAxis, GridAxis), CliError> {
    let (kp, kd) = s
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("expected KP_LO:KP_HI:N,KD_LO:KD_HI:N, got `{s}`")))?;
    let (a, b, n) = parse_range(kp)?;
    let (c, d, m) = parse_range(kd)?;
    Ok((GridAxis::new(a, b, n), GridAxis::new(c, d, m)))
}

/// Region CSV and a one-line summary of verdict disagreements.
pub fn cmd_region(cfg: &RunConfig, grid: &str) -> Result<(String, String), CliError> {
    let (kp, kd) = parse_grid(grid)?;
    let map = analysis::stability_region(&cfg.params, kp, kd).map_err(|e| CliError::Usage(e.to_string()))?;
    let summary = format!(
        "{} points; lemma1 vs routh disagree at {} ({} pass lemma1 only); routh vs numeric disagree at {} away from the boundary",
        map.points.len(),
        map.lemma1_routh_disagreements(),
        map.lemma1_only(),
        map.routh_numeric_disagreements(1e-6)
    );
    Ok((output::region_csv(&map), summary))
}

pub fn cmd_plot(csv_text: &str, columns: Option<&str>, opts: &svg::PlotOptions) -> Result<String, CliError> {
    let table = svg::Table::from_csv(csv_text).map_err(|e| CliError::Usage(e.to_string()))?;
    let series: Vec<String> = match columns {
        Some(c) => c.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        None => table.headers[1..].to_vec(),
    };
    if series.is_empty() {
        return Err(CliError::Usage("no columns to plot".to_string()));
    }
    svg::render(&table, &series, opts).map_err(|e| CliError::Usage(e.to_string()))
}

/// Runs a parsed command without touching stdout.
pub fn execute(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Simulate {
            config,
            condition,
            out,
            t_end,
            step,
            path,
        } => {
            let cfg = load_config(config.as_deref())?;
            let experiment = match condition {
                Some(c) => Experiment::parse(&c).ok_or_else(|| CliError::Usage(format!("unknown condition `{c}`")))?,
                None => cfg.experiment,
            };
            let path = match path {
                PathArg::Blocks => DerivativePath::Blocks,
                PathArg::Statespace => DerivativePath::StateSpace,
            };
            let body = cmd_simulate(&cfg, experiment, t_end, step, path)?;
            Ok(Outcome {
                body,
                out: out.or(cfg.out),
                code: 0,
            })
        }
        Command::Check { config, out } => {
            let cfg = load_config(config.as_deref())?;
            let (text, kv, stable) = cmd_check(&cfg);
            if let Some(p) = out.as_deref() {
                write_file(p, &kv)?;
            }
            Ok(Outcome {
                body: text,
                out: None,
                code: if stable { 0 } else { 1 },
            })
        }
        Command::Sweep {
            config,
            amps,
            out,
            t_end,
            step,
        } => {
            let cfg = load_config(config.as_deref())?;
            let body = cmd_sweep(&cfg, &amps, t_end, step)?;
            Ok(Outcome {
                body,
                out: out.or(cfg.out),
                code: 0,
            })
        }
        Command::Region { config, grid, out } => {
            let cfg = load_config(config.as_deref())?;
            let (body, summary) = cmd_region(&cfg, &grid)?;
            eprintln!("{summary}");
            Ok(Outcome {
                body,
                out: out.or(cfg.out),
                code: 0,
            })
        }
        Command::Plot {
            csv,
            columns,
            out,
            title,
            log_x,
        } => {
            let text = fs::read_to_string(&csv).map_err(|e| CliError::Usage(format!("{}: {e}", csv.display())))?;
            let opts = svg::PlotOptions {
                title,
                log_x,
                ..Default::default()
            };
            let body = cmd_plot(&text, columns.as_deref(), &opts)?;
            Ok(Outcome { body, out, code: 0 })
        }
    }
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    fs::write(path, body).map_err(|e| CliError::Negative(format!("{}: {e}", path.display())))
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(outcome) => {
            let written = match &outcome.out {
                Some(p) => write_file(p, &outcome.body),
                None => std::io::stdout()
                    .write_all(outcome.body.as_bytes())
                    .map_err(|e| CliError::Negative(e.to_string())),
            };
            match written {
                Ok(()) => ExitCode::from(outcome.code),
                Err(e) => {
                    eprintln!("error: {}", e.message());
                    ExitCode::from(e.exit_code())
                }
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("1e-4:1:25").unwrap(), (1e-4, 1.0, 25));
        assert!(parse_range("1:2").is_err());
        assert!(parse_range("a:2:3").is_err());
        let (kp, kd) = parse_grid("-3000:500:50,-3000:500:40").unwrap();
        assert_eq!((kp.n, kd.n), (50, 40));
        assert!(parse_grid("-3000:500:50").is_err());
    }

    #[test]
    fn check_is_independent_of_threshold() {
        let mut cfg = RunConfig::default();
        let base = cmd_check(&cfg);
        cfg.params.ctrl.threshold = 0.5;
        assert_eq!(cmd_check(&cfg), base);
    }
}

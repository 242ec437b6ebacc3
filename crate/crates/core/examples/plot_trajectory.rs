//! Renders the level-platform response as an SVG chart.
//!
//! Usage: `cargo run --example plot_trajectory -- out.svg`

use std::env;
use std::fs;

use dec_sim::cli::output::trajectory_csv;
use dec_sim::cli::svg::{render, PlotOptions, Table};
use dec_sim::simulate::SimOptions;
use dec_sim::{Condition, Params};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = env::args().nth(1).unwrap_or_else(|| "condition1.svg".to_string());
    let traj = Condition::LevelFree.run(&Params::default(), &SimOptions::default())?;
    let table = Table::from_csv(&trajectory_csv(&traj))?;
    let opts = PlotOptions {
        title: Some("free response on a level platform".to_string()),
        ..Default::default()
    };
    let series = ["x1", "x3", "alpha_FS_hat"].map(String::from);
    fs::write(&out, render(&table, &series, &opts)?)?;
    println!("wrote {out}");
    Ok(())
}

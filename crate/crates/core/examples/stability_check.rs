//! Gain conditions, Hurwitz test and eigenvalue classification for a few
//! controller designs.

use dec_sim::cli::output::report_text;
use dec_sim::stability::{analyze, cubic_roots};
use dec_sim::Params;

fn main() {
    for (kp, kd) in [(-1200.0, -1000.0), (-200.0, -1000.0), (0.0, 0.0)] {
        let params = Params::default().with_gains(kp, kd);
        let report = analyze(&params);
        println!("Kp_a = {kp}, Kd_a = {kd}");
        print!("{}", report_text(&report));
        let roots: Vec<String> = cubic_roots(&report.cubic).iter().map(|z| format!("{:.6}", z)).collect();
        println!("cubic roots: {}\n", roots.join(", "));
    }
}

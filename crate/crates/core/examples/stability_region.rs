//! Stability verdicts over the `(Kp_a, Kd_a)` plane, drawn as a character map.
//!
//! `#` stable by the Hurwitz test and the gain conditions, `+` Hurwitz only,
//! `.` unstable.

use dec_sim::analysis::{stability_region, GridAxis};
use dec_sim::Params;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kp = GridAxis::new(-3000.0, 500.0, 36);
    let kd = GridAxis::new(-3000.0, 500.0, 18);
    let map = stability_region(&Params::default(), kp, kd)?;

    println!("rows: Kd_a from {} down to {}; columns: Kp_a from {} to {}", kd.hi, kd.lo, kp.lo, kp.hi);
    for row in map.points.chunks(kp.n).rev() {
        let line: String = row
            .iter()
            .map(|p| match (p.routh, p.lemma1) {
                (true, true) => '#',
                (true, false) => '+',
                (false, true) => '!',
                (false, false) => '.',
            })
            .collect();
        println!("{:>8.0} {line}", row[0].kd);
    }
    println!(
        "lemma1 vs routh disagree at {} of {} points; routh vs eigenvalues at {}",
        map.lemma1_routh_disagreements(),
        map.points.len(),
        map.routh_numeric_disagreements(1e-6)
    );
    Ok(())
}

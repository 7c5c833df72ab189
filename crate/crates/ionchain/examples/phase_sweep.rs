//! Interference curve: maximum excited population of the driven ion as
//! the carrier phase walks around the circle. Minimum at pi, maximum at
//! 0, periodic by construction.
//!
//! ```bash
//! cargo run --release --example phase_sweep
//! ```

use ionchain::experiments::{phase_sweep, sweep_settings};
use ionchain::model::ChainParams;

fn main() {
    let params = ChainParams::new(100).unwrap();
    let phases: Vec<f64> = (0..32)
        .map(|i| std::f64::consts::TAU * i as f64 / 32.0)
        .collect();
    let table = phase_sweep(&params, &phases, 30.0, 1001, &sweep_settings());

    println!("N = 100, g/J = 1, carrier tracking the free amplitude at phase dphi");
    println!(
        "{:>10} {:>10} {:>14}  ",
        "dphi/pi", "max P_e", "transmission"
    );
    let bar_max = table.rows.iter().map(|r| r.max_p_e).fold(0.0, f64::max);
    for row in &table.rows {
        let bar = "#".repeat((40.0 * row.max_p_e / bar_max) as usize);
        println!(
            "{:>10.3} {:>10.4} {:>14.4}  {bar}",
            row.parameter / std::f64::consts::PI,
            row.max_p_e,
            row.transmission
        );
    }

    let min = table
        .rows
        .iter()
        .min_by(|a, b| a.max_p_e.total_cmp(&b.max_p_e))
        .unwrap();
    let max = table
        .rows
        .iter()
        .max_by(|a, b| a.max_p_e.total_cmp(&b.max_p_e))
        .unwrap();
    println!();
    println!(
        "quietest phase: dphi = {:.3} pi (max P_e = {:.2e}); loudest: dphi = {:.3} pi",
        min.parameter / std::f64::consts::PI,
        min.max_p_e,
        max.parameter / std::f64::consts::PI
    );
}

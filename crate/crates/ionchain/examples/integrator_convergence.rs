//! Work-precision picture of the two integrators on the free chain,
//! where the eigenmode closed form supplies the exact answer, plus a
//! fixed-step order check on the exponential test problem.
//!
//! ```bash
//! cargo run --release --example integrator_convergence
//! ```

use ionchain::experiments::{run_chain, Scenario};
use ionchain::integrate::{esdirk_step, rk54_step, FnSystem, IntegratorSettings, Method};
use ionchain::model::ChainParams;
use ionchain::oracle::EigenmodePropagator;
use std::time::Instant;

fn main() {
    let params = ChainParams::new(100).unwrap();
    let propagator = EigenmodePropagator::new(&params);

    println!("free chain N = 100, Jt in [0, 20]: final-state error vs tolerance");
    println!(
        "{:>8} {:>10} {:>12} {:>8} {:>10} {:>12} {:>8}",
        "rtol", "rk54 err", "rhs evals", "time", "esdirk err", "rhs evals", "time"
    );
    for exp in 4..=10 {
        let rtol = 10f64.powi(-exp);
        let mut row = format!("{rtol:>8.0e}");
        for method in [Method::ExplicitRk54, Method::Esdirk] {
            let settings = IntegratorSettings {
                rtol,
                atol: rtol * 1e-2,
                method,
                ..Default::default()
            };
            let start = Instant::now();
            let run = run_chain(Scenario::NoInteraction, &params, 20.0, 3, &settings).unwrap();
            let elapsed = start.elapsed().as_secs_f64();
            let exact = propagator.amplitudes_at(20.0);
            let err = run
                .series
                .records()
                .last()
                .unwrap()
                .amplitudes
                .iter()
                .zip(&exact)
                .map(|(a, e)| (a - e).norm())
                .fold(0.0, f64::max);
            row.push_str(&format!(
                " {err:>10.2e} {:>12} {elapsed:>7.2}s",
                run.stats.rhs_evals
            ));
        }
        println!("{row}");
    }

    // fixed-step order on y' = -y: both pairs advance at 5th order
    println!();
    println!("fixed-step global error on y' = -y over [0, 1]:");
    let system = FnSystem::new(1, |_t, y: &[f64], dy: &mut [f64]| dy[0] = -y[0]);
    let settings = IntegratorSettings::default();
    println!(
        "{:>8} {:>12} {:>8} {:>12} {:>8}",
        "steps", "rk54 err", "order", "esdirk err", "order"
    );
    let mut prev = [f64::NAN; 2];
    for n in [4usize, 8, 16, 32, 64] {
        let h = 1.0 / n as f64;
        let mut errs = [0.0f64; 2];
        for (which, step) in [
            (
                0,
                &(|t: f64, y: &[f64], h: f64| rk54_step(&system, t, y, h, &settings).unwrap().0)
                    as &dyn Fn(f64, &[f64], f64) -> Vec<f64>,
            ),
            (
                1,
                &(|t: f64, y: &[f64], h: f64| esdirk_step(&system, t, y, h, &settings).unwrap().0)
                    as &dyn Fn(f64, &[f64], f64) -> Vec<f64>,
            ),
        ] {
            let mut y = vec![1.0];
            for i in 0..n {
                y = step(i as f64 * h, &y, h);
            }
            errs[which] = (y[0] - (-1.0f64).exp()).abs();
        }
        let orders: Vec<String> = (0..2)
            .map(|i| {
                if prev[i].is_finite() {
                    format!("{:.2}", (prev[i] / errs[i]).log2())
                } else {
                    "-".into()
                }
            })
            .collect();
        println!(
            "{n:>8} {:>12.2e} {:>8} {:>12.2e} {:>8}",
            errs[0], orders[0], errs[1], orders[1]
        );
        prev = errs;
    }
}

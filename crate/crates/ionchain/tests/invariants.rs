//! Integration-level invariants that need full runs: boundary
//! independence, tolerance monotonicity, drive periodicity, and the
//! blockade limits.

use ionchain::experiments::{phase_sweep, pulse_arrival_time, run_chain, transmission, Scenario};
use ionchain::integrate::{IntegratorSettings, Method};
use ionchain::model::ChainParams;
use ionchain::oracle::EigenmodePropagator;

fn explicit() -> IntegratorSettings {
    IntegratorSettings::default().with_method(Method::ExplicitRk54)
}

/// Doubling the chain while keeping the driven site fixed changes
/// nothing inside the clean window: the far boundary is invisible.
#[test]
fn doubling_the_chain_changes_nothing_in_the_window() {
    let short = ChainParams::new(100).unwrap();
    let long = ChainParams::new(200).unwrap().with_driven_site(50).unwrap();
    let a = run_chain(Scenario::JcOnly, &short, 30.0, 601, &explicit()).unwrap();
    let b = run_chain(Scenario::JcOnly, &long, 30.0, 601, &explicit()).unwrap();
    let mut worst: f64 = 0.0;
    for (ra, rb) in a.series.records().iter().zip(b.series.records()) {
        worst = worst.max((ra.p_e - rb.p_e).abs());
        worst = worst.max((ra.amplitudes[50].norm_sqr() - rb.amplitudes[50].norm_sqr()).abs());
    }
    assert!(worst < 1e-6, "boundary dependence {worst:e}");
}

/// Tightening rtol by 10x never increases the final-time error against
/// the eigenmode oracle on the free chain.
#[test]
fn tolerance_tightening_is_monotone() {
    let params = ChainParams::new(20).unwrap();
    let propagator = EigenmodePropagator::new(&params);
    let exact = propagator.amplitudes_at(10.0);
    for method in [Method::ExplicitRk54, Method::Esdirk] {
        let mut prev = f64::INFINITY;
        for exp in 4..=9 {
            let settings = IntegratorSettings {
                rtol: 10f64.powi(-exp),
                atol: 10f64.powi(-exp - 2),
                method,
                ..Default::default()
            };
            let run = run_chain(Scenario::NoInteraction, &params, 10.0, 3, &settings).unwrap();
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
            assert!(
                err <= prev + 1e-15,
                "{method:?} error grew from {prev:e} to {err:e} at rtol 1e-{exp}"
            );
            prev = err;
        }
    }
}

/// The drive enters only through exp(i dphi): phases 0 and 2pi give the
/// same run, and the constructive phase maximises the response.
#[test]
fn phase_is_periodic_and_peaks_at_zero() {
    let params = ChainParams::new(24).unwrap();
    let at_zero = run_chain(Scenario::Custom(0.0), &params, 8.0, 81, &explicit()).unwrap();
    let at_tau = run_chain(
        Scenario::Custom(std::f64::consts::TAU),
        &params,
        8.0,
        81,
        &explicit(),
    )
    .unwrap();
    let mut worst: f64 = 0.0;
    for (a, b) in at_zero.series.records().iter().zip(at_tau.series.records()) {
        worst = worst.max((a.p_e - b.p_e).abs());
    }
    assert!(worst < 1e-8, "periodicity violation {worst:e}");

    let phases: Vec<f64> = (0..16)
        .map(|i| std::f64::consts::TAU * i as f64 / 16.0)
        .collect();
    let table = phase_sweep(&params, &phases, 8.0, 81, &explicit());
    let argmax = table
        .rows
        .iter()
        .max_by(|a, b| a.max_p_e.total_cmp(&b.max_p_e))
        .unwrap();
    assert_eq!(
        argmax.parameter, 0.0,
        "strongest response away from dphi = 0"
    );
    let argmin = table
        .rows
        .iter()
        .min_by(|a, b| a.max_p_e.total_cmp(&b.max_p_e))
        .unwrap();
    assert!(
        (argmin.parameter - std::f64::consts::PI).abs() < 1e-12,
        "weakest response away from dphi = pi"
    );
    assert!(argmin.max_p_e < 1e-6, "pi point not transparent: {:e}", argmin.max_p_e);
}

/// Blockade limits: zero coupling transmits like the free chain, and the
/// transparent drive restores free transmission at any coupling.
#[test]
fn blockade_limits() {
    let params = ChainParams::new(60).unwrap();
    let arrival = pulse_arrival_time(&params, 18.0, 1024);
    let free = run_chain(Scenario::NoInteraction, &params, 18.0, 301, &explicit()).unwrap();
    let t_free = transmission(&free, 30, arrival).unwrap();

    let uncoupled = params.clone().with_coupling(0.0).unwrap();
    let run = run_chain(Scenario::JcOnly, &uncoupled, 18.0, 301, &explicit()).unwrap();
    let t0 = transmission(&run, 30, arrival).unwrap();
    assert!(
        (t0 - t_free).abs() < 1e-9,
        "g = 0 transmission {t0} vs free {t_free}"
    );

    for ratio in [1.0, 20.0] {
        let strong = params.clone().with_coupling(ratio).unwrap();
        let di = run_chain(Scenario::Destructive, &strong, 18.0, 301, &explicit()).unwrap();
        let t_di = transmission(&di, 30, arrival).unwrap();
        assert!(
            (t_di - t_free).abs() < 1e-6,
            "transparency at g/J = {ratio}: {t_di} vs free {t_free}"
        );
    }
}

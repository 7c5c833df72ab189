//! Scenario runners reproducing the headline numerical experiments:
//! single-ion interference, chain transport with a driven middle ion,
//! phase sweeps of the interference criterion, and the phonon-blockade
//! filter, together with derived metrics (transmission, conservation
//! drift).

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::dynamics::{single_ion_rhs, DynamicsError};
use crate::integrate::{
    integrate, ChainOde, FnSystem, IntegrateError, IntegratorSettings, Method, StepStats,
};
use crate::model::{ChainParams, ChainState, DriveConfig, ModelError, Record, TimeSeries};
use crate::oracle::EigenmodePropagator;

/// Environment variable selecting the sweep worker count; absent means
/// one worker per available processor.
pub const WORKERS_ENV: &str = "IONCHAIN_WORKERS";

#[derive(Debug, Error, PartialEq)]
pub enum RunError {
    #[error("{scenario}: {source}")]
    Integration {
        scenario: String,
        #[source]
        source: IntegrateError,
    },
    #[error("{0}")]
    Dynamics(#[from] DynamicsError),
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error("need at least 2 samples (got {0})")]
    TooFewSamples(usize),
    #[error("custom phase must lie in [0, 2pi) (got {0})")]
    PhaseOutOfRange(f64),
    #[error("series is empty")]
    EmptySeries,
    #[error("time {t} is outside the sampled range [{lo}, {hi}]")]
    TimeOutOfRange { t: f64, lo: f64, hi: f64 },
}

/// The four canonical drive scenarios plus a free interference phase.
///
/// `NoInteraction` means no laser for chain runs and carrier-only for
/// the single-ion experiment (the first curve of each published panel).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    NoInteraction,
    JcOnly,
    Constructive,
    Destructive,
    Custom(f64),
}

impl Scenario {
    pub fn custom(phase: f64) -> Result<Self, RunError> {
        if !(0.0..std::f64::consts::TAU).contains(&phase) {
            return Err(RunError::PhaseOutOfRange(phase));
        }
        Ok(Scenario::Custom(phase))
    }

    /// Drive configuration for a chain run.
    pub fn chain_drive(&self) -> DriveConfig {
        match self {
            Scenario::NoInteraction => DriveConfig::free(),
            Scenario::JcOnly => DriveConfig::jc_only(),
            Scenario::Constructive => DriveConfig::tracking(0.0),
            Scenario::Destructive => DriveConfig::tracking(std::f64::consts::PI),
            Scenario::Custom(phase) => DriveConfig::tracking(*phase),
        }
    }

    /// Curve label in a chain figure.
    pub fn chain_label(&self) -> String {
        match self {
            Scenario::NoInteraction => "No int.".into(),
            Scenario::JcOnly => "JC".into(),
            Scenario::Constructive => "CI".into(),
            Scenario::Destructive => "DI".into(),
            Scenario::Custom(phase) => format!("dphi={phase:.3}"),
        }
    }

    /// Curve label in a single-ion figure.
    pub fn single_ion_label(&self) -> String {
        match self {
            Scenario::NoInteraction => "Carrier".into(),
            other => other.chain_label(),
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "no_interaction" => Some(Scenario::NoInteraction),
            "jc_only" => Some(Scenario::JcOnly),
            "constructive" => Some(Scenario::Constructive),
            "destructive" => Some(Scenario::Destructive),
            _ => None,
        }
    }
}

/// Derived metrics of one run; all recomputable from the series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub max_p_e: f64,
    /// Fraction of phonon occupation past the driven site at the final
    /// sample (NaN for single-ion runs).
    pub transmission: f64,
    /// Max |excitation(t) - excitation(0)|.
    pub conservation_drift: f64,
    /// Max |norm(t) - 1|.
    pub norm_drift: f64,
}

impl Metrics {
    pub fn from_series(series: &TimeSeries, site_cut: Option<usize>) -> Self {
        let first_excitation = series.records().first().map_or(0.0, |r| r.excitation);
        let mut max_p_e: f64 = 0.0;
        let mut conservation_drift: f64 = 0.0;
        let mut norm_drift: f64 = 0.0;
        for r in series.records() {
            max_p_e = max_p_e.max(r.p_e);
            conservation_drift = conservation_drift.max((r.excitation - first_excitation).abs());
            norm_drift = norm_drift.max((r.norm - 1.0).abs());
        }
        let transmission = match (site_cut, series.records().last()) {
            (Some(cut), Some(r)) => occupation_past(r, cut),
            _ => f64::NAN,
        };
        Self {
            max_p_e,
            transmission,
            conservation_drift,
            norm_drift,
        }
    }
}

fn occupation_past(record: &Record, site_cut: usize) -> f64 {
    let total: f64 = record.amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let past: f64 = record.amplitudes[site_cut..]
        .iter()
        .map(|a| a.norm_sqr())
        .sum();
    past / total
}

/// Full parameter echo stored next to every result.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub scenario: Scenario,
    pub params: Option<ChainParams>,
    pub alpha: Complex64,
    pub coupling: f64,
    pub t_max: f64,
    pub samples: usize,
    pub settings: IntegratorSettings,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub series: TimeSeries,
    pub metrics: Metrics,
    pub provenance: Provenance,
    pub warnings: Vec<String>,
    pub stats: StepStats,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Effective drives of the single-ion experiment for one scenario:
/// sideband `omega_tilde = g * alpha` and carrier magnitude `g * |alpha|`.
fn single_ion_drives(scenario: Scenario, alpha: Complex64, g: f64) -> (Complex64, Complex64) {
    let balance = g * alpha.norm();
    match scenario {
        Scenario::NoInteraction => (Complex64::new(0.0, 0.0), Complex64::new(balance, 0.0)),
        Scenario::JcOnly => (g * alpha, Complex64::new(0.0, 0.0)),
        Scenario::Constructive => (Complex64::new(balance, 0.0), Complex64::new(balance, 0.0)),
        Scenario::Destructive => (Complex64::new(-balance, 0.0), Complex64::new(balance, 0.0)),
        Scenario::Custom(phase) => (
            Complex64::new(balance, 0.0),
            balance * Complex64::from_polar(1.0, phase),
        ),
    }
}

/// Single driven ion in the effective two-level picture over
/// `gt in [0, gt_max]`.
pub fn run_single_ion(
    scenario: Scenario,
    alpha: Complex64,
    g: f64,
    gt_max: f64,
    samples: usize,
    settings: &IntegratorSettings,
) -> Result<RunResult, RunError> {
    if samples < 2 {
        return Err(RunError::TooFewSamples(samples));
    }
    let (omega_tilde, omega2) = single_ion_drives(scenario, alpha, g);
    let system = FnSystem::new(3, move |t, y: &[f64], dy: &mut [f64]| {
        let ds = single_ion_rhs(t, [y[0], y[1], y[2]], omega_tilde, omega2);
        dy.copy_from_slice(&ds);
    });
    // time axis: g t for g > 0; the bare magnitudes already carry g
    let t_max = gt_max / if g > 0.0 { g } else { 1.0 };
    let scale = gt_max / t_max;
    let times = linspace(0.0, t_max, samples);
    let traj = integrate(&system, &[0.0, 0.0, -1.0], (0.0, t_max), settings, &times).map_err(
        |source| RunError::Integration {
            scenario: format!("single-ion {}", scenario.single_ion_label()),
            source,
        },
    )?;

    let phonons = alpha.norm_sqr();
    let records: Vec<Record> = traj
        .states
        .iter()
        .map(|y| {
            let state = ChainState::new(vec![], [y[0], y[1], y[2]]);
            Record {
                p_e: state.excited_population(),
                norm: state.bloch_norm(),
                excitation: phonons + state.excited_population(),
                amplitudes: vec![],
            }
        })
        .collect();
    let series = TimeSeries::new(times.iter().map(|t| t * scale).collect(), records)?;
    let metrics = Metrics::from_series(&series, None);
    Ok(RunResult {
        series,
        metrics,
        provenance: Provenance {
            scenario,
            params: None,
            alpha,
            coupling: g,
            t_max: gt_max,
            samples,
            settings: *settings,
        },
        warnings: vec![],
        stats: traj.stats,
    })
}

/// Driven chain over `Jt in [0, jt_max]`: integrates the full dynamics
/// and records the driven-site population, the downstream occupation,
/// every site occupation, and the conservation diagnostics.
///
/// Warns (without failing) when the eigenmode oracle shows that
/// reflections from the chain ends reach the driven site inside the
/// window.
pub fn run_chain(
    scenario: Scenario,
    params: &ChainParams,
    jt_max: f64,
    samples: usize,
    settings: &IntegratorSettings,
) -> Result<RunResult, RunError> {
    if samples < 2 {
        return Err(RunError::TooFewSamples(samples));
    }
    let config = scenario.chain_drive();
    let reference = EigenmodePropagator::new(params);
    let ode = ChainOde::new(params, &config, Some(&reference))?;

    let t_max = jt_max
        / if params.hop() > 0.0 {
            params.hop()
        } else {
            1.0
        };
    let times = linspace(0.0, t_max, samples);
    let y0 = crate::model::initial_state(params).to_flat_vec();
    let traj = integrate(&ode, &y0, (0.0, t_max), settings, &times).map_err(|source| {
        RunError::Integration {
            scenario: format!("chain {}", scenario.chain_label()),
            source,
        }
    })?;

    let records: Vec<Record> = traj
        .states
        .iter()
        .map(|y| {
            let state = ChainState::from_flat(y);
            Record {
                p_e: state.excited_population(),
                norm: state.bloch_norm(),
                excitation: state.excitation_number(),
                amplitudes: state.amplitudes().to_vec(),
            }
        })
        .collect();
    // report the dimensionless axis Jt; raw time when J = 0
    let axis: Vec<f64> = if params.hop() > 0.0 {
        times.iter().map(|t| t * params.hop()).collect()
    } else {
        times.clone()
    };
    let series = TimeSeries::new(axis, records)?;
    let metrics = Metrics::from_series(&series, Some(params.driven_site()));

    let mut warnings = vec![];
    if let Some(t_dirty) = reflection_contamination(params, t_max) {
        warnings.push(format!(
            "reflections from the chain ends reach site {} near Jt = {:.1}, inside the window",
            params.driven_site(),
            t_dirty * params.hop()
        ));
    }

    Ok(RunResult {
        series,
        metrics,
        provenance: Provenance {
            scenario,
            params: Some(params.clone()),
            alpha: params.alpha0(),
            coupling: params.coupling(),
            t_max: jt_max,
            samples,
            settings: *settings,
        },
        warnings,
        stats: traj.stats,
    })
}

/// First time (if any) at which the free amplitude of the driven site on
/// the actual chain deviates from a doubled chain, i.e. boundary
/// reflections contaminate the window.
fn reflection_contamination(params: &ChainParams, t_max: f64) -> Option<f64> {
    let doubled = ChainParams::new(2 * params.n_ions())
        .ok()?
        .with_hop(params.hop())
        .ok()?
        .with_alpha0(params.alpha0())
        .ok()?
        .with_driven_site(params.driven_site())
        .ok()?;
    let short = EigenmodePropagator::new(params);
    let long = EigenmodePropagator::new(&doubled);
    let m = params.driven_site();
    let checks = 64;
    for i in 1..=checks {
        let t = t_max * i as f64 / checks as f64;
        if (short.amplitude_at(m, t) - long.amplitude_at(m, t)).norm() > 1e-9 {
            return Some(t);
        }
    }
    None
}

/// Fraction of phonon occupation past `site_cut` at time `t`, linearly
/// interpolated between the bracketing samples.
pub fn transmission(result: &RunResult, site_cut: usize, t: f64) -> Result<f64, RunError> {
    let series = &result.series;
    if series.is_empty() {
        return Err(RunError::EmptySeries);
    }
    let times = series.times();
    let (lo, hi) = (times[0], times[times.len() - 1]);
    if t < lo || t > hi {
        return Err(RunError::TimeOutOfRange { t, lo, hi });
    }
    let idx = times.partition_point(|&x| x < t);
    let value_at = |i: usize| occupation_past(&series.records()[i], site_cut);
    if idx == 0 {
        return Ok(value_at(0));
    }
    if times[idx.min(times.len() - 1)] == t {
        return Ok(value_at(idx.min(times.len() - 1)));
    }
    let (t0, t1) = (times[idx - 1], times[idx]);
    let (v0, v1) = (value_at(idx - 1), value_at(idx));
    Ok(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
}

/// Time (on the sampled grid) at which the free pulse peaks at the site
/// just past the driven ion; used as the arrival time for blockade
/// metrics.
pub fn pulse_arrival_time(params: &ChainParams, jt_max: f64, grid: usize) -> f64 {
    let propagator = EigenmodePropagator::new(params);
    let site = (params.driven_site() + 1).min(params.n_ions());
    let t_max = jt_max / params.hop().max(f64::MIN_POSITIVE);
    let mut best = (0.0, 0.0);
    for i in 0..grid {
        let t = t_max * i as f64 / (grid - 1) as f64;
        let v = propagator.amplitude_at(site, t).norm_sqr();
        if v > best.1 {
            best = (t, v);
        }
    }
    best.0 * params.hop()
}

/// One row of a sweep table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    /// Swept parameter: interference phase or coupling ratio.
    pub parameter: f64,
    pub max_p_e: f64,
    pub transmission: f64,
}

/// Sweep output: rows sorted by parameter, failures kept alongside.
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub failures: Vec<(f64, String)>,
}

fn sweep_pool() -> rayon::ThreadPool {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var(WORKERS_ENV) {
        if let Ok(workers) = value.parse::<usize>() {
            if workers > 0 {
                builder = builder.num_threads(workers);
            }
        }
    }
    builder.build().expect("worker pool")
}

/// Interference curve: one destructive-to-constructive chain run per
/// phase, reporting max P_e of the driven site and the final
/// transmission.
pub fn phase_sweep(
    params: &ChainParams,
    phases: &[f64],
    jt_max: f64,
    samples: usize,
    settings: &IntegratorSettings,
) -> SweepTable {
    let outcomes: Vec<(f64, Result<SweepRow, String>)> = sweep_pool().install(|| {
        phases
            .par_iter()
            .map(|&phase| {
                let result = run_chain(Scenario::Custom(phase), params, jt_max, samples, settings)
                    .map(|r| SweepRow {
                        parameter: phase,
                        max_p_e: r.metrics.max_p_e,
                        transmission: r.metrics.transmission,
                    })
                    .map_err(|e| e.to_string());
                (phase, result)
            })
            .collect()
    });
    collect_sweep(outcomes)
}

/// Blockade filter curve: sideband-only transmission past the driven
/// site at pulse-arrival time, for each coupling ratio `g / J`.
pub fn blockade_sweep(
    params: &ChainParams,
    ratios: &[f64],
    jt_max: f64,
    samples: usize,
    settings: &IntegratorSettings,
) -> SweepTable {
    let arrival = pulse_arrival_time(params, jt_max, 2048);
    let outcomes: Vec<(f64, Result<SweepRow, String>)> = sweep_pool().install(|| {
        ratios
            .par_iter()
            .map(|&ratio| {
                let run = params
                    .clone()
                    .with_coupling(ratio * params.hop())
                    .map_err(|e| e.to_string())
                    .and_then(|p| {
                        run_chain(Scenario::JcOnly, &p, jt_max, samples, settings)
                            .map_err(|e| e.to_string())
                            .and_then(|r| {
                                transmission(&r, p.driven_site(), arrival)
                                    .map(|t| SweepRow {
                                        parameter: ratio,
                                        max_p_e: r.metrics.max_p_e,
                                        transmission: t,
                                    })
                                    .map_err(|e| e.to_string())
                            })
                    });
                (ratio, run)
            })
            .collect()
    });
    collect_sweep(outcomes)
}

fn collect_sweep(outcomes: Vec<(f64, Result<SweepRow, String>)>) -> SweepTable {
    let mut rows = vec![];
    let mut failures = vec![];
    for (parameter, outcome) in outcomes {
        match outcome {
            Ok(row) => rows.push(row),
            Err(message) => failures.push((parameter, message)),
        }
    }
    rows.sort_by(|a, b| a.parameter.total_cmp(&b.parameter));
    failures.sort_by(|a, b| a.0.total_cmp(&b.0));
    SweepTable { rows, failures }
}

/// Default phase grid: 64 points over [0, 2pi).
pub fn default_phase_grid() -> Vec<f64> {
    let n = 64;
    (0..n)
        .map(|i| std::f64::consts::TAU * i as f64 / n as f64)
        .collect()
}

/// Default coupling-ratio grid: 16 log-spaced points in [0.25, 64].
pub fn default_ratio_grid() -> Vec<f64> {
    let n = 16;
    let (lo, hi) = (0.25f64, 64.0f64);
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// Integrator defaults for sweeps: the explicit method, which is much
/// faster at these mild stiffness ratios and leaves the implicit method
/// as the cross-check.
pub fn sweep_settings() -> IntegratorSettings {
    IntegratorSettings::default().with_method(Method::ExplicitRk54)
}

//! Command-line front end: configuration loading, scenario execution,
//! CSV/SVG emission, and the figure reproduction commands.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

pub mod config;
pub mod csv;
pub mod plot;

pub use config::{ConfigError, Experiment, RunConfig, ScenarioKey};

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::experiments::{
    blockade_sweep, default_phase_grid, phase_sweep, run_chain, run_single_ion, RunError,
    RunResult, Scenario,
};
use crate::integrate::Method;
use crate::model::TimeSeries;
use plot::{Curve, Panel};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Run(#[from] RunError),
    #[error("{0}")]
    Model(#[from] crate::model::ModelError),
    #[error("could not read {path}: {source}")]
    ReadConfig {
        path: String,
        source: std::io::Error,
    },
    #[error("could not write {path}: {source}")]
    WriteOutput {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Plot(#[from] plot::PlotError),
}

#[derive(Parser)]
#[command(
    name = "ionchain",
    version,
    about = "Light-phonon interference in driven trapped-ion chains",
    after_help = "Configuration files use strict `key = value` lines; see the README for the \
                  grammar and the full key list. Flags override configuration values, which \
                  override defaults.\n\nDefaults: experiment chain, scenario destructive \
                  (delta_phi = pi), n_ions 100, hop 1, coupling 1, alpha 1+0i, driven_site \
                  (N+1)/2, t_max 30 (chain/sweeps) or 10 (single-ion), samples 2001, \
                  rtol 1e-10, atol 1e-12, h_init 1e-3, h_min 1e-13, h_max inf, \
                  max_steps 1000000, method esdirk (runs) or rk54 (sweeps), output \
                  <experiment>.csv, emit_plot false, sweep_points 64 (phase) or 16 \
                  (blockade), ratio_min 0.25, ratio_max 64."
)]
struct Cli {
    /// Configuration file with `key = value` lines
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Stream integrator statistics to stderr
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single driven ion in the effective two-level picture (time axis gt)
    SingleIon(SingleIonArgs),
    /// Driven N-ion chain (time axis Jt)
    Chain(ChainArgs),
    /// Max P_e and transmission versus the interference phase
    SweepPhase(SweepArgs),
    /// Sideband-only transmission versus the coupling ratio g/J
    SweepBlockade(SweepArgs),
    /// Re-run a pinned figure end to end (CSV + SVG)
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScenarioArg {
    NoInteraction,
    JcOnly,
    Constructive,
    Destructive,
}

impl ScenarioArg {
    fn key(self) -> ScenarioKey {
        match self {
            Self::NoInteraction => ScenarioKey::NoInteraction,
            Self::JcOnly => ScenarioKey::JcOnly,
            Self::Constructive => ScenarioKey::Constructive,
            Self::Destructive => ScenarioKey::Destructive,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Rk54,
    Esdirk,
}

impl MethodArg {
    fn method(self) -> Method {
        match self {
            Self::Rk54 => Method::ExplicitRk54,
            Self::Esdirk => Method::Esdirk,
        }
    }
}

fn phase_value(s: &str) -> Result<f64, String> {
    config::parse_phase(s).ok_or_else(|| format!("`{s}` is not a phase (float, pi, or <float>pi)"))
}

#[derive(Args, Default)]
struct CommonArgs {
    /// Drive scenario
    #[arg(long, value_enum)]
    scenario: Option<ScenarioArg>,
    /// Interference phase (float, `pi`, or `<float>pi`); selects the
    /// custom scenario
    #[arg(long, value_parser = phase_value)]
    delta_phi: Option<f64>,
    /// Effective sideband coupling g
    #[arg(long)]
    coupling: Option<f64>,
    /// Window length in dimensionless time (gt or Jt)
    #[arg(long)]
    t_max: Option<f64>,
    /// Number of output samples
    #[arg(long)]
    samples: Option<usize>,
    /// Relative tolerance
    #[arg(long)]
    rtol: Option<f64>,
    /// Absolute tolerance
    #[arg(long)]
    atol: Option<f64>,
    /// Integration method
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// CSV output path (default: <experiment>.csv)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write an SVG plot next to the CSV
    #[arg(long)]
    plot: bool,
}

impl CommonArgs {
    fn apply(&self, config: &mut RunConfig) {
        if let Some(s) = self.scenario {
            config.scenario = s.key();
        }
        if let Some(p) = self.delta_phi {
            config.delta_phi = p;
            config.scenario = ScenarioKey::Custom;
        }
        if let Some(g) = self.coupling {
            config.coupling = g;
        }
        if let Some(t) = self.t_max {
            config.t_max = Some(t);
        }
        if let Some(n) = self.samples {
            config.samples = n;
        }
        if let Some(r) = self.rtol {
            config.rtol = r;
        }
        if let Some(a) = self.atol {
            config.atol = a;
        }
        if let Some(m) = self.method {
            config.method = Some(m.method());
        }
        if let Some(path) = &self.output {
            config.output = Some(path.clone());
        }
        if self.plot {
            config.emit_plot = true;
        }
    }
}

#[derive(Args, Default)]
struct SingleIonArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Real part of the initial coherent amplitude
    #[arg(long)]
    alpha_re: Option<f64>,
    /// Imaginary part of the initial coherent amplitude
    #[arg(long)]
    alpha_im: Option<f64>,
}

#[derive(Args, Default)]
struct ChainArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of ions
    #[arg(long)]
    n_ions: Option<usize>,
    /// Hopping rate J
    #[arg(long)]
    hop: Option<f64>,
    /// 1-based index of the driven ion (default: the central ion)
    #[arg(long)]
    driven_site: Option<usize>,
    /// Real part of the launched amplitude
    #[arg(long)]
    alpha_re: Option<f64>,
    /// Imaginary part of the launched amplitude
    #[arg(long)]
    alpha_im: Option<f64>,
    /// Companion wide CSV with the full per-site snapshot
    #[arg(long)]
    wide: Option<PathBuf>,
}

#[derive(Args, Default)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of ions
    #[arg(long)]
    n_ions: Option<usize>,
    /// Hopping rate J
    #[arg(long)]
    hop: Option<f64>,
    /// Number of sweep points
    #[arg(long)]
    points: Option<usize>,
    /// Smallest coupling ratio (blockade sweep)
    #[arg(long)]
    ratio_min: Option<f64>,
    /// Largest coupling ratio (blockade sweep)
    #[arg(long)]
    ratio_max: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReproduceTarget {
    /// Four single-ion interference scenarios over gt in [0, 10]
    Fig1b,
    /// Four chain scenarios (N = 100, g/J = 1) over Jt in [0, 30]
    Fig2c,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(value_enum)]
    target: ReproduceTarget,
    /// Directory for the CSV and SVG outputs (default: current directory)
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
}

/// Run the command line and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::default();
    if let Some(path) = path {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
            path: path.display().to_string(),
            source,
        })?;
        config.apply_document(&text)?;
    }
    Ok(config)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let mut config = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::SingleIon(args) => {
            config.experiment = Experiment::SingleIon;
            args.common.apply(&mut config);
            if let Some(re) = args.alpha_re {
                config.alpha.re = re;
            }
            if let Some(im) = args.alpha_im {
                config.alpha.im = im;
            }
            config.validate()?;
            exec_single_ion(&config, cli.verbose)
        }
        Command::Chain(args) => {
            config.experiment = Experiment::Chain;
            args.common.apply(&mut config);
            if let Some(n) = args.n_ions {
                config.n_ions = n;
            }
            if let Some(hop) = args.hop {
                config.hop = hop;
            }
            if let Some(site) = args.driven_site {
                config.driven_site = Some(site);
            }
            if let Some(re) = args.alpha_re {
                config.alpha.re = re;
            }
            if let Some(im) = args.alpha_im {
                config.alpha.im = im;
            }
            config.validate()?;
            exec_chain(&config, args.wide.as_deref(), cli.verbose)
        }
        Command::SweepPhase(args) => {
            config.experiment = Experiment::PhaseSweep;
            apply_sweep_args(&args, &mut config);
            config.validate()?;
            exec_sweep_phase(&config, cli.verbose)
        }
        Command::SweepBlockade(args) => {
            config.experiment = Experiment::BlockadeSweep;
            apply_sweep_args(&args, &mut config);
            config.validate()?;
            exec_sweep_blockade(&config, cli.verbose)
        }
        Command::Reproduce(args) => match args.target {
            ReproduceTarget::Fig1b => reproduce_fig1b(&args.output_dir, cli.verbose),
            ReproduceTarget::Fig2c => reproduce_fig2c(&args.output_dir, cli.verbose),
        },
    }
}

fn apply_sweep_args(args: &SweepArgs, config: &mut RunConfig) {
    args.common.apply(config);
    if let Some(n) = args.n_ions {
        config.n_ions = n;
    }
    if let Some(hop) = args.hop {
        config.hop = hop;
    }
    if let Some(p) = args.points {
        config.sweep_points = Some(p);
    }
    if let Some(r) = args.ratio_min {
        config.ratio_min = r;
    }
    if let Some(r) = args.ratio_max {
        config.ratio_max = r;
    }
}

fn resolve_scenario(config: &RunConfig) -> Result<Scenario, RunError> {
    Ok(match config.scenario {
        ScenarioKey::NoInteraction => Scenario::NoInteraction,
        ScenarioKey::JcOnly => Scenario::JcOnly,
        ScenarioKey::Constructive => Scenario::Constructive,
        ScenarioKey::Destructive => Scenario::Destructive,
        ScenarioKey::Custom => {
            Scenario::custom(config.delta_phi.rem_euclid(std::f64::consts::TAU))?
        }
    })
}

fn write_file<F>(path: &Path, write: F) -> Result<u64, CliError>
where
    F: FnOnce(&mut std::io::BufWriter<std::fs::File>) -> std::io::Result<u64>,
{
    let file = std::fs::File::create(path).map_err(|source| CliError::WriteOutput {
        path: path.display().to_string(),
        source,
    })?;
    let mut writer = std::io::BufWriter::new(file);
    write(&mut writer).map_err(|source| CliError::WriteOutput {
        path: path.display().to_string(),
        source,
    })
}

fn report(path: &Path, bytes: u64) {
    println!("wrote {} ({bytes} bytes)", path.display());
}

fn emit_stats(verbose: bool, label: &str, result: &RunResult) {
    if verbose {
        eprintln!("[{label}] {}", result.stats);
    }
    for warning in &result.warnings {
        eprintln!("warning: {warning}");
    }
}

fn settings_comments(config: &RunConfig, fallback: Method) -> Vec<String> {
    let settings = config.integrator_settings(fallback);
    vec![format!(
        "integrator: {}, rtol = {:e}, atol = {:e}",
        match settings.method {
            Method::ExplicitRk54 => "rk54",
            Method::Esdirk => "esdirk",
        },
        settings.rtol,
        settings.atol
    )]
}

fn exec_single_ion(config: &RunConfig, verbose: bool) -> Result<(), CliError> {
    let scenario = resolve_scenario(config)?;
    let settings = config.integrator_settings(Method::Esdirk);
    let result = run_single_ion(
        scenario,
        config.alpha,
        config.coupling,
        config.resolved_t_max(),
        config.samples,
        &settings,
    )?;
    emit_stats(verbose, "single-ion", &result);

    let mut comments = vec![
        format!(
            "ionchain single-ion, scenario {}",
            scenario.single_ion_label()
        ),
        format!(
            "alpha = {} + {}i, g = {}, gt_max = {}, samples = {}",
            config.alpha.re,
            config.alpha.im,
            config.coupling,
            config.resolved_t_max(),
            config.samples
        ),
    ];
    comments.extend(settings_comments(config, Method::Esdirk));

    let path = config
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("single_ion.csv"));
    let bytes = write_file(&path, |w| {
        csv::write_single_ion_series(&result, w, &comments)
    })?;
    report(&path, bytes);

    if config.emit_plot {
        let svg_path = path.with_extension("svg");
        let panel = Panel {
            title: format!("Single ion, {}", scenario.single_ion_label()),
            x_label: "gt".into(),
            y_label: "P_e".into(),
            curves: vec![Curve {
                label: scenario.single_ion_label(),
                points: series_points(&result.series, |s, i| s.records()[i].p_e),
            }],
        };
        plot::emit_plot(&[panel], &svg_path)?;
        println!("wrote {}", svg_path.display());
    }
    Ok(())
}

fn series_points<F: Fn(&TimeSeries, usize) -> f64>(series: &TimeSeries, f: F) -> Vec<(f64, f64)> {
    series
        .times()
        .iter()
        .enumerate()
        .map(|(i, t)| (*t, f(series, i)))
        .collect()
}

fn exec_chain(config: &RunConfig, wide: Option<&Path>, verbose: bool) -> Result<(), CliError> {
    let scenario = resolve_scenario(config)?;
    let params = config.chain_params()?;
    let settings = config.integrator_settings(Method::Esdirk);
    let result = run_chain(
        scenario,
        &params,
        config.resolved_t_max(),
        config.samples,
        &settings,
    )?;
    emit_stats(verbose, "chain", &result);

    let mut comments = vec![
        format!("ionchain chain, scenario {}", scenario.chain_label()),
        format!(
            "n_ions = {}, J = {}, g = {}, driven_site = {}, alpha_1 = {} + {}i, Jt_max = {}, samples = {}",
            params.n_ions(),
            params.hop(),
            params.coupling(),
            params.driven_site(),
            params.alpha0().re,
            params.alpha0().im,
            config.resolved_t_max(),
            config.samples
        ),
    ];
    comments.extend(settings_comments(config, Method::Esdirk));

    let path = config
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("chain.csv"));
    let bytes = write_file(&path, |w| csv::write_chain_series(&result, w, &comments))?;
    report(&path, bytes);

    if let Some(wide_path) = wide {
        let bytes = write_file(wide_path, |w| csv::write_wide_series(&result, w, &comments))?;
        report(wide_path, bytes);
    }

    if config.emit_plot {
        let svg_path = path.with_extension("svg");
        let m = params.driven_site();
        let next = (m + 1).min(params.n_ions());
        let panel = Panel {
            title: format!(
                "Chain N = {}, {}, g/J = {}",
                params.n_ions(),
                scenario.chain_label(),
                params.coupling() / params.hop().max(f64::MIN_POSITIVE)
            ),
            x_label: "Jt".into(),
            y_label: "population".into(),
            curves: vec![
                Curve {
                    label: format!("P_e({m})"),
                    points: series_points(&result.series, |s, i| s.records()[i].p_e),
                },
                Curve {
                    label: format!("|alpha_{next}|^2"),
                    points: series_points(&result.series, |s, i| {
                        s.records()[i].amplitudes[next - 1].norm_sqr()
                    }),
                },
            ],
        };
        plot::emit_plot(&[panel], &svg_path)?;
        println!("wrote {}", svg_path.display());
    }
    Ok(())
}

fn exec_sweep_phase(config: &RunConfig, verbose: bool) -> Result<(), CliError> {
    let params = config.chain_params()?;
    let settings = config.integrator_settings(Method::ExplicitRk54);
    let phases = match config.sweep_points {
        Some(n) => (0..n)
            .map(|i| std::f64::consts::TAU * i as f64 / n as f64)
            .collect(),
        None => default_phase_grid(),
    };
    let table = phase_sweep(
        &params,
        &phases,
        config.resolved_t_max(),
        config.samples,
        &settings,
    );
    if verbose {
        eprintln!(
            "[sweep-phase] {} points, {} failures",
            table.rows.len(),
            table.failures.len()
        );
    }
    for (parameter, message) in &table.failures {
        eprintln!("warning: phase {parameter} failed: {message}");
    }

    let comments = vec![
        "ionchain sweep-phase".to_string(),
        format!(
            "n_ions = {}, J = {}, g = {}, Jt_max = {}, points = {}",
            params.n_ions(),
            params.hop(),
            params.coupling(),
            config.resolved_t_max(),
            phases.len()
        ),
    ];
    let path = config
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("phase_sweep.csv"));
    let bytes = write_file(&path, |w| {
        csv::write_sweep(&table, "delta_phi", w, &comments)
    })?;
    report(&path, bytes);

    if config.emit_plot {
        let svg_path = path.with_extension("svg");
        let panel = Panel {
            title: "Interference phase sweep".into(),
            x_label: "delta_phi".into(),
            y_label: "value".into(),
            curves: vec![
                Curve {
                    label: "max P_e".into(),
                    points: table
                        .rows
                        .iter()
                        .map(|r| (r.parameter, r.max_p_e))
                        .collect(),
                },
                Curve {
                    label: "transmission".into(),
                    points: table
                        .rows
                        .iter()
                        .map(|r| (r.parameter, r.transmission))
                        .collect(),
                },
            ],
        };
        plot::emit_plot(&[panel], &svg_path)?;
        println!("wrote {}", svg_path.display());
    }
    Ok(())
}

fn exec_sweep_blockade(config: &RunConfig, verbose: bool) -> Result<(), CliError> {
    let params = config.chain_params()?;
    let settings = config.integrator_settings(Method::ExplicitRk54);
    let points = config.sweep_points.unwrap_or(16);
    let (lo, hi) = (config.ratio_min, config.ratio_max);
    let ratios: Vec<f64> = (0..points)
        .map(|i| lo * (hi / lo).powf(i as f64 / (points.max(2) - 1) as f64))
        .collect();
    let table = blockade_sweep(
        &params,
        &ratios,
        config.resolved_t_max(),
        config.samples,
        &settings,
    );
    if verbose {
        eprintln!(
            "[sweep-blockade] {} points, {} failures",
            table.rows.len(),
            table.failures.len()
        );
    }
    for (parameter, message) in &table.failures {
        eprintln!("warning: ratio {parameter} failed: {message}");
    }

    let comments = vec![
        "ionchain sweep-blockade (sideband only)".to_string(),
        format!(
            "n_ions = {}, J = {}, Jt_max = {}, ratios in [{lo}, {hi}], points = {points}",
            params.n_ions(),
            params.hop(),
            config.resolved_t_max()
        ),
        "transmission measured at the free-pulse arrival time".to_string(),
    ];
    let path = config
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("blockade_sweep.csv"));
    let bytes = write_file(&path, |w| {
        csv::write_sweep(&table, "g_over_J", w, &comments)
    })?;
    report(&path, bytes);

    if config.emit_plot {
        let svg_path = path.with_extension("svg");
        let panel = Panel {
            title: "Phonon-blockade filter".into(),
            x_label: "log10(g/J)".into(),
            y_label: "transmission".into(),
            curves: vec![Curve {
                label: "transmission".into(),
                points: table
                    .rows
                    .iter()
                    .map(|r| (r.parameter.log10(), r.transmission))
                    .collect(),
            }],
        };
        plot::emit_plot(&[panel], &svg_path)?;
        println!("wrote {}", svg_path.display());
    }
    Ok(())
}

const FIG_SCENARIOS: [Scenario; 4] = [
    Scenario::NoInteraction,
    Scenario::JcOnly,
    Scenario::Constructive,
    Scenario::Destructive,
];

/// Column-safe scenario label: "No int." -> "no_int", "CI" -> "ci".
fn sanitize(label: &str) -> String {
    label
        .chars()
        .filter_map(|c| match c {
            ' ' => Some('_'),
            '.' => None,
            c => Some(c.to_ascii_lowercase()),
        })
        .collect()
}

/// Four single-ion scenarios, every parameter pinned: |alpha| = 1,
/// g = 1, gt in [0, 10], 2001 samples, implicit integrator at default
/// tolerances.
fn reproduce_fig1b(output_dir: &Path, verbose: bool) -> Result<(), CliError> {
    use num_complex::Complex64;
    let settings = crate::integrate::IntegratorSettings::default();
    let alpha = Complex64::new(1.0, 0.0);
    let mut results = vec![];
    for scenario in FIG_SCENARIOS {
        let result = run_single_ion(scenario, alpha, 1.0, 10.0, 2001, &settings)?;
        emit_stats(
            verbose,
            &format!("fig1b {}", scenario.single_ion_label()),
            &result,
        );
        results.push((scenario, result));
    }

    let comments = vec![
        "ionchain reproduce fig1b".to_string(),
        "four single-ion scenarios: Carrier, JC, CI, DI".to_string(),
        "|alpha| = 1, g = 1, gt in [0, 10], 2001 samples".to_string(),
        format!(
            "integrator: esdirk, rtol = {:e}, atol = {:e}",
            settings.rtol, settings.atol
        ),
        "columns: t is the dimensionless time gt; P_e_<scenario> is the excited population"
            .to_string(),
    ];
    let labels: Vec<String> = results
        .iter()
        .map(|(s, _)| sanitize(&s.single_ion_label()))
        .collect();
    let serieses: Vec<&TimeSeries> = results.iter().map(|(_, r)| &r.series).collect();

    let csv_path = output_dir.join("fig1b.csv");
    let p_e = |s: &TimeSeries, i: usize| s.records()[i].p_e;
    let bytes = write_file(&csv_path, |w| {
        csv::write_multi_series(&labels, &serieses, &[("P_e", &p_e)], w, &comments)
    })?;
    report(&csv_path, bytes);

    let panel = Panel {
        title: "Single-ion interference: excited population".into(),
        x_label: "gt".into(),
        y_label: "P_e".into(),
        curves: results
            .iter()
            .map(|(s, r)| Curve {
                label: s.single_ion_label(),
                points: series_points(&r.series, |ts, i| ts.records()[i].p_e),
            })
            .collect(),
    };
    let svg_path = output_dir.join("fig1b.svg");
    plot::emit_plot(&[panel], &svg_path)?;
    println!("wrote {}", svg_path.display());
    Ok(())
}

/// Four chain scenarios, every parameter pinned: N = 100, J = 1, g = 1,
/// alpha_1 = 1, Jt in [0, 30], 2001 samples, implicit integrator.
fn reproduce_fig2c(output_dir: &Path, verbose: bool) -> Result<(), CliError> {
    let settings = crate::integrate::IntegratorSettings::default();
    let params = crate::model::ChainParams::new(100)?;
    let mut results = vec![];
    for scenario in FIG_SCENARIOS {
        let result = run_chain(scenario, &params, 30.0, 2001, &settings)?;
        emit_stats(
            verbose,
            &format!("fig2c {}", scenario.chain_label()),
            &result,
        );
        results.push((scenario, result));
    }

    let comments = vec![
        "ionchain reproduce fig2c".to_string(),
        "four chain scenarios: No int., JC, CI, DI".to_string(),
        "N = 100, J = 1, g = 1, alpha_1 = 1, driven site 50, Jt in [0, 30], 2001 samples"
            .to_string(),
        format!("integrator: esdirk, rtol = {:e}, atol = {:e}", settings.rtol, settings.atol),
        "columns: P_e_<scenario> is the driven-site excited population; alpha51_sq_<scenario> is |alpha_51|^2"
            .to_string(),
    ];
    let labels: Vec<String> = results
        .iter()
        .map(|(s, _)| sanitize(&s.chain_label()))
        .collect();
    let serieses: Vec<&TimeSeries> = results.iter().map(|(_, r)| &r.series).collect();

    let csv_path = output_dir.join("fig2c.csv");
    let p_e = |s: &TimeSeries, i: usize| s.records()[i].p_e;
    let alpha51_sq = |s: &TimeSeries, i: usize| s.records()[i].amplitudes[50].norm_sqr();
    let bytes = write_file(&csv_path, |w| {
        csv::write_multi_series(
            &labels,
            &serieses,
            &[("P_e", &p_e), ("alpha51_sq", &alpha51_sq)],
            w,
            &comments,
        )
    })?;
    report(&csv_path, bytes);

    let top = Panel {
        title: "Driven-site excited population".into(),
        x_label: "Jt".into(),
        y_label: "P_e(50)".into(),
        curves: results
            .iter()
            .map(|(s, r)| Curve {
                label: s.chain_label(),
                points: series_points(&r.series, |ts, i| ts.records()[i].p_e),
            })
            .collect(),
    };
    let bottom = Panel {
        title: "Occupation just past the driven site".into(),
        x_label: "Jt".into(),
        y_label: "|alpha_51|^2".into(),
        curves: results
            .iter()
            .map(|(s, r)| Curve {
                label: s.chain_label(),
                points: series_points(&r.series, |ts, i| ts.records()[i].amplitudes[50].norm_sqr()),
            })
            .collect(),
    };
    let svg_path = output_dir.join("fig2c.svg");
    plot::emit_plot(&[top, bottom], &svg_path)?;
    println!("wrote {}", svg_path.display());
    Ok(())
}

//! Strict key/value run configuration.
//!
//! # Grammar
//!
//! ```text
//! document := line (NEWLINE line)*
//! line     := ws* [binding] ws* [comment]
//! comment  := '#' <anything up to end of line>
//! binding  := key ws* '=' ws* value
//! key      := [a-z][a-z0-9_]*
//! value    := <non-empty run of characters, trimmed; no '#'>
//! ```
//!
//! Every key is optional and has a documented default; unknown keys are
//! rejected with a suggestion, as are duplicate keys. Phases accept a
//! plain float, `pi`, or `<float>pi` (e.g. `0.5pi`).

use std::path::PathBuf;

use num_complex::Complex64;
use thiserror::Error;

use crate::integrate::{IntegratorSettings, Method};
use crate::model::{ChainParams, ModelError};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown key `{key}` at line {line}{}", suggestion_text(.suggestion))]
    UnknownKey {
        key: String,
        line: usize,
        suggestion: Option<String>,
    },
    #[error("duplicate key `{key}` at line {line}")]
    DuplicateKey { key: String, line: usize },
    #[error("invalid value for `{key}` at line {line}: {message}")]
    InvalidValue {
        key: String,
        line: usize,
        message: String,
    },
    #[error("{0}")]
    Invariant(#[from] ModelError),
}

fn suggestion_text(suggestion: &Option<String>) -> String {
    match suggestion {
        Some(s) => format!(" (did you mean `{s}`?)"),
        None => String::new(),
    }
}

/// Which experiment the run executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    SingleIon,
    Chain,
    PhaseSweep,
    BlockadeSweep,
}

impl Experiment {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "single_ion" => Some(Self::SingleIon),
            "chain" => Some(Self::Chain),
            "phase_sweep" => Some(Self::PhaseSweep),
            "blockade_sweep" => Some(Self::BlockadeSweep),
            _ => None,
        }
    }
}

/// Scenario selector as written in configuration files.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenarioKey {
    NoInteraction,
    JcOnly,
    Constructive,
    Destructive,
    Custom,
}

/// Fully-defaulted run configuration. Defaults reproduce the headline
/// chain experiment: 100 ions, g/J = 1, destructive phase, rtol 1e-9.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub scenario: ScenarioKey,
    /// Interference phase; used when `scenario` is `Custom`.
    pub delta_phi: f64,
    pub n_ions: usize,
    pub hop: f64,
    pub coupling: f64,
    pub alpha: Complex64,
    pub driven_site: Option<usize>,
    /// Dimensionless window length (`Jt` for chains, `gt` single ion);
    /// `None` means the per-experiment default (30 chain, 10 single ion).
    pub t_max: Option<f64>,
    pub samples: usize,
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
    /// `None` means the per-experiment default (implicit for runs,
    /// explicit for sweeps).
    pub method: Option<Method>,
    pub output: Option<PathBuf>,
    pub emit_plot: bool,
    pub sweep_points: Option<usize>,
    pub ratio_min: f64,
    pub ratio_max: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let settings = IntegratorSettings::default();
        Self {
            experiment: Experiment::Chain,
            scenario: ScenarioKey::Destructive,
            delta_phi: std::f64::consts::PI,
            n_ions: 100,
            hop: 1.0,
            coupling: 1.0,
            alpha: Complex64::new(1.0, 0.0),
            driven_site: None,
            t_max: None,
            samples: 2001,
            rtol: settings.rtol,
            atol: settings.atol,
            h_init: settings.h_init,
            h_min: settings.h_min,
            h_max: settings.h_max,
            max_steps: settings.max_steps,
            method: None,
            output: None,
            emit_plot: false,
            sweep_points: None,
            ratio_min: 0.25,
            ratio_max: 64.0,
        }
    }
}

const KEYS: &[&str] = &[
    "experiment",
    "scenario",
    "delta_phi",
    "n_ions",
    "hop",
    "coupling",
    "alpha_re",
    "alpha_im",
    "driven_site",
    "t_max",
    "samples",
    "rtol",
    "atol",
    "h_init",
    "h_min",
    "h_max",
    "max_steps",
    "method",
    "output",
    "emit_plot",
    "sweep_points",
    "ratio_min",
    "ratio_max",
];

impl RunConfig {
    /// Parse a configuration document on top of the defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut config = Self::default();
        config.apply_document(text)?;
        config.validate()?;
        Ok(config)
    }

    /// Apply a document to an existing configuration (defaults already
    /// in place; flags are applied afterwards by the caller).
    pub fn apply_document(&mut self, text: &str) -> Result<(), ConfigError> {
        let mut seen: Vec<String> = vec![];
        for (line_idx, raw) in text.lines().enumerate() {
            let line_no = line_idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            if line.trim().is_empty() {
                continue;
            }
            let eq = line.find('=').ok_or_else(|| ConfigError::Syntax {
                line: line_no,
                column: line.len(),
                message: "expected `key = value`".into(),
            })?;
            let key = line[..eq].trim();
            let value = line[eq + 1..].trim();
            let key_col = raw.find(key).map_or(1, |p| p + 1);
            if key.is_empty()
                || !key.chars().next().is_some_and(|c| c.is_ascii_lowercase())
                || !key
                    .chars()
                    .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
            {
                return Err(ConfigError::Syntax {
                    line: line_no,
                    column: key_col,
                    message: format!("malformed key `{key}`"),
                });
            }
            if value.is_empty() {
                return Err(ConfigError::Syntax {
                    line: line_no,
                    column: eq + 2,
                    message: format!("missing value for `{key}`"),
                });
            }
            if !KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey {
                    key: key.into(),
                    line: line_no,
                    suggestion: closest_key(key),
                });
            }
            if seen.iter().any(|s| s == key) {
                return Err(ConfigError::DuplicateKey {
                    key: key.into(),
                    line: line_no,
                });
            }
            seen.push(key.into());
            self.apply_one(key, value, line_no)?;
        }
        Ok(())
    }

    fn apply_one(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        let bad = |message: String| ConfigError::InvalidValue {
            key: key.into(),
            line,
            message,
        };
        match key {
            "experiment" => {
                self.experiment = Experiment::parse(value).ok_or_else(|| {
                    bad("expected single_ion | chain | phase_sweep | blockade_sweep".into())
                })?;
            }
            "scenario" => {
                self.scenario = match value {
                    "no_interaction" => ScenarioKey::NoInteraction,
                    "jc_only" => ScenarioKey::JcOnly,
                    "constructive" => ScenarioKey::Constructive,
                    "destructive" => ScenarioKey::Destructive,
                    "custom" => ScenarioKey::Custom,
                    _ => return Err(bad(
                        "expected no_interaction | jc_only | constructive | destructive | custom"
                            .into(),
                    )),
                };
            }
            "delta_phi" => {
                self.delta_phi = parse_phase(value)
                    .ok_or_else(|| bad("expected a float, `pi`, or `<float>pi`".into()))?;
                self.scenario = ScenarioKey::Custom;
            }
            "n_ions" => {
                self.n_ions =
                    parse_num(value).ok_or_else(|| bad("expected a positive integer".into()))?
            }
            "hop" => self.hop = parse_f64(value).ok_or_else(|| bad("expected a float".into()))?,
            "coupling" => {
                self.coupling = parse_f64(value).ok_or_else(|| bad("expected a float".into()))?
            }
            "alpha_re" => {
                self.alpha.re = parse_f64(value).ok_or_else(|| bad("expected a float".into()))?
            }
            "alpha_im" => {
                self.alpha.im = parse_f64(value).ok_or_else(|| bad("expected a float".into()))?
            }
            "driven_site" => {
                self.driven_site = Some(
                    parse_num(value).ok_or_else(|| bad("expected a positive integer".into()))?,
                )
            }
            "t_max" => {
                self.t_max = Some(parse_f64(value).ok_or_else(|| bad("expected a float".into()))?)
            }
            "samples" => {
                self.samples =
                    parse_num(value).ok_or_else(|| bad("expected a positive integer".into()))?
            }
            "rtol" => self.rtol = parse_f64(value).ok_or_else(|| bad("expected a float".into()))?,
            "atol" => self.atol = parse_f64(value).ok_or_else(|| bad("expected a float".into()))?,
            "h_init" => {
                self.h_init = parse_f64(value).ok_or_else(|| bad("expected a float".into()))?
            }
            "h_min" => {
                self.h_min = parse_f64(value).ok_or_else(|| bad("expected a float".into()))?
            }
            "h_max" => {
                self.h_max = parse_f64(value).ok_or_else(|| bad("expected a float".into()))?
            }
            "max_steps" => {
                self.max_steps =
                    parse_num(value).ok_or_else(|| bad("expected a positive integer".into()))?
            }
            "method" => {
                self.method = Some(match value {
                    "rk54" => Method::ExplicitRk54,
                    "esdirk" => Method::Esdirk,
                    _ => return Err(bad("expected rk54 | esdirk".into())),
                })
            }
            "output" => self.output = Some(PathBuf::from(value)),
            "emit_plot" => {
                self.emit_plot = match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(bad("expected true | false".into())),
                }
            }
            "sweep_points" => {
                self.sweep_points = Some(
                    parse_num(value).ok_or_else(|| bad("expected a positive integer".into()))?,
                )
            }
            "ratio_min" => {
                self.ratio_min = parse_f64(value).ok_or_else(|| bad("expected a float".into()))?
            }
            "ratio_max" => {
                self.ratio_max = parse_f64(value).ok_or_else(|| bad("expected a float".into()))?
            }
            _ => unreachable!("key membership checked"),
        }
        Ok(())
    }

    /// Cross-field invariant checks, reported with the field name.
    pub fn validate(&self) -> Result<(), ConfigError> {
        // ChainParams owns the chain invariants
        let mut params = ChainParams::new(self.n_ions)?
            .with_hop(self.hop)?
            .with_coupling(self.coupling)?
            .with_alpha0(self.alpha)?;
        if let Some(site) = self.driven_site {
            params = params.with_driven_site(site)?;
        }
        let _ = params;
        let invalid = |key: &str, message: &str| ConfigError::InvalidValue {
            key: key.into(),
            line: 0,
            message: message.into(),
        };
        if self.samples < 2 {
            return Err(invalid("samples", "need at least 2 samples"));
        }
        if !(self.rtol > 0.0 && self.rtol < 1.0) {
            return Err(invalid("rtol", "must lie in (0, 1)"));
        }
        if !(self.atol > 0.0) {
            return Err(invalid("atol", "must be positive"));
        }
        if let Some(t) = self.t_max {
            if !(t > 0.0) {
                return Err(invalid("t_max", "must be positive"));
            }
        }
        if !(self.ratio_min > 0.0 && self.ratio_max > self.ratio_min) {
            return Err(invalid("ratio_min", "need 0 < ratio_min < ratio_max"));
        }
        Ok(())
    }

    /// Chain parameters implied by this configuration.
    pub fn chain_params(&self) -> Result<ChainParams, ModelError> {
        let mut params = ChainParams::new(self.n_ions)?
            .with_hop(self.hop)?
            .with_coupling(self.coupling)?
            .with_alpha0(self.alpha)?
            .with_phase(self.delta_phi)?;
        if let Some(site) = self.driven_site {
            params = params.with_driven_site(site)?;
        }
        Ok(params)
    }

    /// Integrator settings implied by this configuration; `fallback` is
    /// the per-experiment default method.
    pub fn integrator_settings(&self, fallback: Method) -> IntegratorSettings {
        IntegratorSettings {
            rtol: self.rtol,
            atol: self.atol,
            h_init: self.h_init,
            h_min: self.h_min,
            h_max: self.h_max,
            max_steps: self.max_steps,
            method: self.method.unwrap_or(fallback),
        }
    }

    pub fn resolved_t_max(&self) -> f64 {
        self.t_max.unwrap_or(match self.experiment {
            Experiment::SingleIon => 10.0,
            _ => 30.0,
        })
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_num(s: &str) -> Option<usize> {
    s.parse::<usize>().ok().filter(|v| *v > 0)
}

/// `pi`, `<float>pi`, or a plain float.
pub fn parse_phase(s: &str) -> Option<f64> {
    if s == "pi" {
        return Some(std::f64::consts::PI);
    }
    if let Some(prefix) = s.strip_suffix("pi") {
        return parse_f64(prefix).map(|v| v * std::f64::consts::PI);
    }
    parse_f64(s)
}

fn closest_key(key: &str) -> Option<String> {
    KEYS.iter()
        .map(|k| (levenshtein(key, k), *k))
        .filter(|(d, _)| *d <= 3)
        .min_by_key(|(d, _)| *d)
        .map(|(_, k)| k.to_string())
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let cost = usize::from(ca != cb);
            cur[j + 1] = (prev[j] + cost).min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

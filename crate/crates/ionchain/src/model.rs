//! Domain types shared by every other module: chain parameters, dynamic
//! state, drive configuration, sampled observables, and the unit
//! conventions that tie them together.
//!
//! Simulation units are dimensionless. Chain runs set the hopping rate
//! `J = 1` and report time as `Jt`; single-ion runs set the sideband
//! coupling `g = 1` and report time as `gt`. [`PhysicalPreset`] exists
//! only to convert laboratory numbers (angular frequencies) into these
//! units.

use num_complex::Complex64;
use thiserror::Error;

/// Construction errors for the domain types. Each variant names the
/// violated invariant.
#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("n_ions must be >= 1 (got {0})")]
    EmptyChain(usize),
    #[error("driven_site must lie in 1..={n_ions} (got {driven_site})")]
    DrivenSiteOutOfRange { driven_site: usize, n_ions: usize },
    #[error("{name} must be non-negative (got {value})")]
    NegativeRate { name: &'static str, value: f64 },
    #[error("{name} must be finite (got {value})")]
    NonFinite { name: &'static str, value: f64 },
    #[error("Lamb-Dicke parameter must satisfy 0 < eta <= 0.25 (got {0})")]
    LambDickeOutOfRange(f64),
    #[error("{name} must be strictly positive (got {value})")]
    NonPositiveFrequency { name: &'static str, value: f64 },
    #[error("sample times must be strictly increasing (violated at index {0})")]
    TimesNotIncreasing(usize),
    #[error("each time must carry exactly one record ({times} times, {records} records)")]
    RecordMismatch { times: usize, records: usize },
    #[error("state has {amplitudes} amplitudes but the chain has {n_ions} sites")]
    DimensionMismatch { amplitudes: usize, n_ions: usize },
}

fn check_finite(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::NonFinite { name, value })
    }
}

/// Laboratory-frame drive parameters, all as angular frequencies.
///
/// Used only to convert experimental numbers into the dimensionless
/// parameters of [`ChainParams`]; nothing downstream consumes it
/// directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalPreset {
    /// Lamb-Dicke parameter (dimensionless).
    pub eta: f64,
    /// Rabi frequency of the sideband (Jaynes-Cummings) laser.
    pub rabi1: f64,
    /// Rabi magnitude of the resonant carrier laser.
    pub rabi2_scale: f64,
    /// Vibrational hopping rate J between neighbouring ions.
    pub hop: f64,
}

impl PhysicalPreset {
    pub fn new(eta: f64, rabi1: f64, rabi2_scale: f64, hop: f64) -> Result<Self, ModelError> {
        for (name, value) in [
            ("eta", eta),
            ("rabi1", rabi1),
            ("rabi2_scale", rabi2_scale),
            ("hop", hop),
        ] {
            check_finite(name, value)?;
        }
        if !(eta > 0.0 && eta <= 0.25) {
            return Err(ModelError::LambDickeOutOfRange(eta));
        }
        for (name, value) in [("rabi1", rabi1), ("rabi2_scale", rabi2_scale), ("hop", hop)] {
            if value <= 0.0 {
                return Err(ModelError::NonPositiveFrequency { name, value });
            }
        }
        Ok(Self {
            eta,
            rabi1,
            rabi2_scale,
            hop,
        })
    }

    /// Effective sideband coupling `g = eta * rabi1`, in the same units
    /// as the inputs.
    pub fn effective_coupling(&self) -> f64 {
        self.eta * self.rabi1
    }

    /// Coherent amplitude that balances the two drives on a single ion,
    /// `|alpha| = rabi2 / (eta * rabi1)`. With this amplitude the carrier
    /// can exactly cancel (or double) the sideband interaction.
    pub fn balance_amplitude(&self) -> f64 {
        self.rabi2_scale / (self.eta * self.rabi1)
    }

    /// Dimensionless coupling ratio `g / J` used by chain simulations.
    pub fn coupling_ratio(&self) -> f64 {
        self.effective_coupling() / self.hop
    }
}

/// Static description of a driven ion chain in dimensionless units.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainParams {
    n_ions: usize,
    hop: f64,
    coupling: f64,
    phase: f64,
    alpha0: Complex64,
    driven_site: usize,
}

impl ChainParams {
    /// Chain of `n_ions` sites with `J = 1`, `g = 1`, interference phase
    /// `pi`, unit pulse launched at site 1, and the central ion driven.
    pub fn new(n_ions: usize) -> Result<Self, ModelError> {
        if n_ions == 0 {
            return Err(ModelError::EmptyChain(0));
        }
        Ok(Self {
            n_ions,
            hop: 1.0,
            coupling: 1.0,
            phase: std::f64::consts::PI,
            alpha0: Complex64::new(1.0, 0.0),
            driven_site: (n_ions + 1) / 2,
        })
    }

    pub fn with_hop(mut self, hop: f64) -> Result<Self, ModelError> {
        check_finite("hop", hop)?;
        if hop < 0.0 {
            return Err(ModelError::NegativeRate {
                name: "hop",
                value: hop,
            });
        }
        self.hop = hop;
        Ok(self)
    }

    pub fn with_coupling(mut self, coupling: f64) -> Result<Self, ModelError> {
        check_finite("coupling", coupling)?;
        if coupling < 0.0 {
            return Err(ModelError::NegativeRate {
                name: "coupling",
                value: coupling,
            });
        }
        self.coupling = coupling;
        Ok(self)
    }

    pub fn with_phase(mut self, phase: f64) -> Result<Self, ModelError> {
        check_finite("phase", phase)?;
        self.phase = phase;
        Ok(self)
    }

    pub fn with_alpha0(mut self, alpha0: Complex64) -> Result<Self, ModelError> {
        check_finite("alpha0.re", alpha0.re)?;
        check_finite("alpha0.im", alpha0.im)?;
        self.alpha0 = alpha0;
        Ok(self)
    }

    /// Sites are numbered 1..=n_ions.
    pub fn with_driven_site(mut self, driven_site: usize) -> Result<Self, ModelError> {
        if driven_site == 0 || driven_site > self.n_ions {
            return Err(ModelError::DrivenSiteOutOfRange {
                driven_site,
                n_ions: self.n_ions,
            });
        }
        self.driven_site = driven_site;
        Ok(self)
    }

    pub fn n_ions(&self) -> usize {
        self.n_ions
    }

    pub fn hop(&self) -> f64 {
        self.hop
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn alpha0(&self) -> Complex64 {
        self.alpha0
    }

    /// 1-based index of the laser-driven ion.
    pub fn driven_site(&self) -> usize {
        self.driven_site
    }

    /// Length of the flattened real state vector: two amplitude
    /// components per site plus the three Bloch components.
    pub fn flat_dim(&self) -> usize {
        2 * self.n_ions + 3
    }
}

/// Dynamic state: one complex coherent amplitude per site plus the Bloch
/// vector of the driven ion's electronic state.
///
/// Only the driven ion carries a Bloch vector. Undriven ions never leave
/// the electronic ground state (the lasers address a single site), so
/// storing their spins would only widen the state vector; evolving them
/// alongside would yield identically constant components.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    amplitudes: Vec<Complex64>,
    bloch: [f64; 3],
}

impl ChainState {
    pub fn new(amplitudes: Vec<Complex64>, bloch: [f64; 3]) -> Self {
        Self { amplitudes, bloch }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn bloch(&self) -> [f64; 3] {
        self.bloch
    }

    pub fn n_sites(&self) -> usize {
        self.amplitudes.len()
    }

    /// Coherent amplitude at the given 1-based site.
    pub fn amplitude(&self, site: usize) -> Complex64 {
        self.amplitudes[site - 1]
    }

    /// Excited-state population of the driven ion, `(1 + s_z) / 2`.
    pub fn excited_population(&self) -> f64 {
        (1.0 + self.bloch[2]) / 2.0
    }

    /// Total excitation number `sum_k |alpha_k|^2 + (1 + s_z) / 2`.
    ///
    /// Conserved by the sideband interaction alone; the carrier is an
    /// external drive and changes it.
    pub fn excitation_number(&self) -> f64 {
        let phonons: f64 = self.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        phonons + self.excited_population()
    }

    /// Euclidean norm of the Bloch vector; exactly 1 along
    /// dissipation-free evolution from a pure state.
    pub fn bloch_norm(&self) -> f64 {
        let [x, y, z] = self.bloch;
        (x * x + y * y + z * z).sqrt()
    }

    /// Flatten into `[re a_1, im a_1, ..., re a_N, im a_N, s_x, s_y, s_z]`.
    pub fn to_flat(&self, out: &mut [f64]) {
        assert_eq!(out.len(), 2 * self.amplitudes.len() + 3);
        for (k, a) in self.amplitudes.iter().enumerate() {
            out[2 * k] = a.re;
            out[2 * k + 1] = a.im;
        }
        let n = self.amplitudes.len();
        out[2 * n..].copy_from_slice(&self.bloch);
    }

    pub fn to_flat_vec(&self) -> Vec<f64> {
        let mut out = vec![0.0; 2 * self.amplitudes.len() + 3];
        self.to_flat(&mut out);
        out
    }

    pub fn from_flat(flat: &[f64]) -> Self {
        assert!(flat.len() >= 3 && (flat.len() - 3) % 2 == 0);
        let n = (flat.len() - 3) / 2;
        let amplitudes = (0..n)
            .map(|k| Complex64::new(flat[2 * k], flat[2 * k + 1]))
            .collect();
        Self {
            amplitudes,
            bloch: [flat[2 * n], flat[2 * n + 1], flat[2 * n + 2]],
        }
    }
}

/// Initial state: the pulse amplitude on site 1, vacuum elsewhere, and
/// the driven ion's electronic state in the ground state `(0, 0, -1)`.
pub fn initial_state(params: &ChainParams) -> ChainState {
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); params.n_ions()];
    amplitudes[0] = params.alpha0();
    ChainState::new(amplitudes, [0.0, 0.0, -1.0])
}

/// How the carrier Rabi frequency is modulated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CarrierMode {
    /// Fixed complex Rabi frequency.
    Constant(Complex64),
    /// `Omega_2(t) = g * alpha_m_free(t) * exp(i * phase)`, tracking the
    /// laser-free amplitude of the driven site. Requires a
    /// free-propagation reference at evaluation time.
    ReferenceTracking { phase: f64 },
}

/// Which lasers are on and how the carrier is modulated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveConfig {
    pub jc_on: bool,
    pub carrier_on: bool,
    pub carrier_mode: CarrierMode,
}

impl DriveConfig {
    /// No lasers at all.
    pub fn free() -> Self {
        Self {
            jc_on: false,
            carrier_on: false,
            carrier_mode: CarrierMode::Constant(Complex64::new(0.0, 0.0)),
        }
    }

    /// Sideband laser only.
    pub fn jc_only() -> Self {
        Self {
            jc_on: true,
            carrier_on: false,
            carrier_mode: CarrierMode::Constant(Complex64::new(0.0, 0.0)),
        }
    }

    /// Both lasers, carrier tracking the free amplitude with the given
    /// interference phase.
    pub fn tracking(phase: f64) -> Self {
        Self {
            jc_on: true,
            carrier_on: true,
            carrier_mode: CarrierMode::ReferenceTracking { phase },
        }
    }
}

/// One sampled snapshot of the observables.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    /// Excited-state population of the driven ion.
    pub p_e: f64,
    /// Norm diagnostic: Bloch-vector norm for semiclassical runs, total
    /// state-vector norm for exact quantum runs.
    pub norm: f64,
    /// Total excitation number.
    pub excitation: f64,
    /// Per-site coherent amplitudes (mean field or `<a_k>`); empty for
    /// pure two-level runs.
    pub amplitudes: Vec<Complex64>,
}

/// Observables sampled on a strictly increasing time grid.
///
/// Times are dimensionless (`Jt` for chain runs, `gt` for single-ion
/// runs), matching the axes the results are plotted against.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    records: Vec<Record>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, records: Vec<Record>) -> Result<Self, ModelError> {
        if times.len() != records.len() {
            return Err(ModelError::RecordMismatch {
                times: times.len(),
                records: records.len(),
            });
        }
        for i in 1..times.len() {
            if !(times[i] > times[i - 1]) {
                return Err(ModelError::TimesNotIncreasing(i));
            }
        }
        Ok(Self { times, records })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `|alpha_site|^2` column for a 1-based site index.
    pub fn site_occupation(&self, site: usize) -> Vec<f64> {
        self.records
            .iter()
            .map(|r| r.amplitudes[site - 1].norm_sqr())
            .collect()
    }

    pub fn p_e(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.p_e).collect()
    }

    pub fn max_p_e(&self) -> f64 {
        self.records.iter().map(|r| r.p_e).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn initial_state_matches_contract() {
        let params = ChainParams::new(3).unwrap();
        let state = initial_state(&params);
        assert_eq!(state.amplitudes().len(), 3);
        assert_eq!(state.amplitude(1), Complex64::new(1.0, 0.0));
        assert_eq!(state.amplitude(2), Complex64::new(0.0, 0.0));
        assert_eq!(state.amplitude(3), Complex64::new(0.0, 0.0));
        assert_eq!(state.bloch(), [0.0, 0.0, -1.0]);
        assert_eq!(state.excited_population(), 0.0);
    }

    #[test]
    fn initial_state_single_site_vacuum() {
        let params = ChainParams::new(1)
            .unwrap()
            .with_alpha0(Complex64::new(0.0, 0.0))
            .unwrap();
        let state = initial_state(&params);
        assert_eq!(state.amplitudes(), &[Complex64::new(0.0, 0.0)]);
        assert_eq!(state.bloch(), [0.0, 0.0, -1.0]);
    }

    #[test]
    fn hundred_ion_chain_drives_site_fifty() {
        let params = ChainParams::new(100).unwrap();
        assert_eq!(params.driven_site(), 50);
        let state = initial_state(&params);
        assert_eq!(state.amplitudes().len(), 100);
        assert!(state
            .amplitudes()
            .iter()
            .skip(1)
            .all(|a| *a == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn initial_state_is_deterministic() {
        let params = ChainParams::new(7).unwrap();
        assert_eq!(initial_state(&params), initial_state(&params));
    }

    #[test]
    fn excited_population_examples() {
        let ground = ChainState::new(vec![], [0.0, 0.0, -1.0]);
        assert_eq!(ground.excited_population(), 0.0);
        let excited = ChainState::new(vec![], [0.0, 0.0, 1.0]);
        assert_eq!(excited.excited_population(), 1.0);
        let equator = ChainState::new(vec![], [1.0, 0.0, 0.0]);
        assert_eq!(equator.excited_population(), 0.5);
    }

    #[test]
    fn excitation_number_examples() {
        let params = ChainParams::new(2).unwrap();
        assert_abs_diff_eq!(initial_state(&params).excitation_number(), 1.0);
        let params2 = params
            .clone()
            .with_alpha0(Complex64::new(2.0, 0.0))
            .unwrap();
        assert_abs_diff_eq!(initial_state(&params2).excitation_number(), 4.0);
        let flipped = ChainState::new(vec![Complex64::new(0.0, 0.0); 2], [0.0, 0.0, 1.0]);
        assert_abs_diff_eq!(flipped.excitation_number(), 1.0);
    }

    #[test]
    fn bloch_norm_examples() {
        assert_eq!(ChainState::new(vec![], [0.0, 0.0, -1.0]).bloch_norm(), 1.0);
        assert_eq!(ChainState::new(vec![], [0.0, 0.0, 0.0]).bloch_norm(), 0.0);
        assert_abs_diff_eq!(
            ChainState::new(vec![], [0.6, 0.0, 0.8]).bloch_norm(),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn effective_coupling_from_lab_numbers() {
        // eta = 0.2, Omega_1 = 0.8 * 2pi MHz -> g = 160 * 2pi kHz
        let tau = std::f64::consts::TAU;
        let preset = PhysicalPreset::new(0.2, 0.8e6 * tau, 0.16e6 * tau, 3.0e3 * tau).unwrap();
        assert_abs_diff_eq!(preset.effective_coupling(), 160.0e3 * tau, epsilon = 1e-3);
        assert_abs_diff_eq!(preset.balance_amplitude(), 1.0, epsilon = 1e-12);
        // ratio of the two lab rates
        assert_abs_diff_eq!(preset.coupling_ratio(), 160.0 / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn zero_sideband_laser_is_rejected() {
        let err = PhysicalPreset::new(0.2, 0.0, 1.0, 1.0).unwrap_err();
        assert!(matches!(
            err,
            ModelError::NonPositiveFrequency { name: "rabi1", .. }
        ));
    }

    #[test]
    fn invalid_params_name_the_violated_invariant() {
        assert_eq!(ChainParams::new(0).unwrap_err(), ModelError::EmptyChain(0));
        let err = ChainParams::new(5)
            .unwrap()
            .with_driven_site(6)
            .unwrap_err();
        assert_eq!(
            err,
            ModelError::DrivenSiteOutOfRange {
                driven_site: 6,
                n_ions: 5
            }
        );
        let err = ChainParams::new(5).unwrap().with_hop(-1.0).unwrap_err();
        assert!(matches!(err, ModelError::NegativeRate { name: "hop", .. }));
        assert!(PhysicalPreset::new(0.3, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn flat_roundtrip_preserves_state() {
        let state = ChainState::new(
            vec![Complex64::new(0.3, -0.4), Complex64::new(-1.0, 2.0)],
            [0.1, -0.2, 0.97],
        );
        let flat = state.to_flat_vec();
        assert_eq!(flat.len(), 7);
        assert_eq!(ChainState::from_flat(&flat), state);
    }

    #[test]
    fn time_series_rejects_unordered_times() {
        let rec = Record {
            p_e: 0.0,
            norm: 1.0,
            excitation: 0.0,
            amplitudes: vec![],
        };
        let err = TimeSeries::new(vec![0.0, 0.0], vec![rec.clone(), rec.clone()]).unwrap_err();
        assert_eq!(err, ModelError::TimesNotIncreasing(1));
        let err = TimeSeries::new(vec![0.0], vec![]).unwrap_err();
        assert_eq!(
            err,
            ModelError::RecordMismatch {
                times: 1,
                records: 0
            }
        );
    }

    proptest::proptest! {
        /// P_e stays in [0, 1] wherever the Bloch vector is physical.
        #[test]
        fn population_is_bounded_on_the_sphere(
            x in -1.0..1.0f64, y in -1.0..1.0f64, z in -1.0..1.0f64,
        ) {
            let norm = (x * x + y * y + z * z).sqrt();
            proptest::prop_assume!(norm > 1e-6);
            let s = [x / norm.max(1.0), y / norm.max(1.0), z / norm.max(1.0)];
            let state = ChainState::new(vec![], s);
            let p = state.excited_population();
            proptest::prop_assert!((-1e-12..=1.0 + 1e-12).contains(&p));
        }
    }

    #[test]
    fn observers_do_not_mutate() {
        let state = ChainState::new(vec![Complex64::new(0.5, 0.5)], [0.1, 0.2, -0.9]);
        let copy = state.clone();
        let _ = state.excited_population();
        let _ = state.excitation_number();
        let _ = state.bloch_norm();
        assert_eq!(state, copy);
    }
}

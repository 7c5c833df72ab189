//! Right-hand side of the semiclassical equations of motion for the
//! driven chain, plus the modulated carrier drive.
//!
//! # Equations of motion
//!
//! The interaction-picture Hamiltonian of the chain is
//!
//! ```text
//! H = J sum_k (a_k' a_{k+1} + a_{k+1}' a_k)
//!   + (g/2) (a_m s+ + a_m' s-)                  sideband (JC) laser
//!   + (1/2) (O2(t) s+ + conj(O2)(t) s-)         carrier laser
//! ```
//!
//! with both lasers addressing the single site `m`. Treating each mode as
//! a classical coherent amplitude `alpha_k = <a_k>` and the driven ion's
//! spin as its Bloch vector `s = (<s_x>, <s_y>, <s_z>)`, the Heisenberg
//! equations with mean-field factorisation give
//!
//! ```text
//! d alpha_k / dt = -i J (alpha_{k+1} + alpha_{k-1})
//!                  - delta_{k,m} * i (g/2) * s-,   s- = (s_x - i s_y)/2
//! d s_x / dt = -Im(W) s_z
//! d s_y / dt = -Re(W) s_z
//! d s_z / dt =  Re(W) s_y + Im(W) s_x
//! ```
//!
//! where `W(t) = g alpha_m(t) + O2(t)` is the total complex field seen by
//! the spin (each term present only while its laser is on), and sites
//! beyond the ends are zero. In this form `d|s|^2/dt = 0` identically, and
//! with the carrier off the excitation number
//! `sum |alpha_k|^2 + (1 + s_z)/2` is conserved: the spin equations are a
//! rigid rotation of the Bloch vector about the axis
//! `(-Im W, -Re W, 0)`. The time normalisation is fixed so that a
//! constant real carrier `O2` alone gives `P_e(t) = sin^2(O2 t / 2)`,
//! i.e. a full population flip at `O2 t = pi`.
//!
//! # Carrier modulation
//!
//! In tracking mode the carrier follows the laser-free amplitude of the
//! driven site: `O2(t) = g alpha_m_free(t) exp(i dphi)`. Along the free
//! trajectory the total field becomes
//! `W = g alpha_m_free (1 + exp(i dphi))`, so `dphi = 0` doubles the
//! drive and `dphi = pi` cancels it exactly, leaving the electronic state
//! untouched while the phonon pulse passes.

use num_complex::Complex64;
use thiserror::Error;

use crate::model::{CarrierMode, ChainParams, ChainState, DriveConfig};

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("carrier is in tracking mode but no free-propagation reference was supplied")]
    MissingReference,
    #[error("state has {state} amplitudes but the chain has {params} sites")]
    DimensionMismatch { state: usize, params: usize },
}

/// Laser-free amplitude of the driven site as a function of time.
///
/// Implemented by the eigenmode propagator in the oracle module; any
/// closed-form or precomputed source works. Must be safe for concurrent
/// read-only use.
pub trait FreeReference: Sync {
    fn driven_site_amplitude(&self, t: f64) -> Complex64;
}

/// Tracking reference backed by a plain closure, mostly for tests.
pub struct FnReference<F: Fn(f64) -> Complex64 + Sync>(pub F);

impl<F: Fn(f64) -> Complex64 + Sync> FreeReference for FnReference<F> {
    fn driven_site_amplitude(&self, t: f64) -> Complex64 {
        (self.0)(t)
    }
}

/// Instantaneous drive values: the carrier Rabi frequency and the total
/// spin field `W = g alpha_m + O2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSample {
    pub omega2: Complex64,
    pub w_total: Complex64,
}

/// Carrier Rabi frequency at time `t`.
///
/// Constant mode returns the configured value; tracking mode returns
/// `g * alpha_m_free(t) * exp(i dphi)` and requires a reference.
pub fn carrier_drive(
    t: f64,
    config: &DriveConfig,
    params: &ChainParams,
    reference: Option<&dyn FreeReference>,
) -> Result<Complex64, DynamicsError> {
    match config.carrier_mode {
        CarrierMode::Constant(omega2) => Ok(omega2),
        CarrierMode::ReferenceTracking { phase } => {
            let reference = reference.ok_or(DynamicsError::MissingReference)?;
            let alpha_free = reference.driven_site_amplitude(t);
            Ok(params.coupling() * alpha_free * Complex64::from_polar(1.0, phase))
        }
    }
}

/// Drive seen by the spin at time `t` given the current state.
pub fn sample_drive(
    t: f64,
    state: &ChainState,
    params: &ChainParams,
    config: &DriveConfig,
    reference: Option<&dyn FreeReference>,
) -> Result<DriveSample, DynamicsError> {
    let omega2 = if config.carrier_on {
        carrier_drive(t, config, params, reference)?
    } else {
        Complex64::new(0.0, 0.0)
    };
    let jc = if config.jc_on {
        params.coupling() * state.amplitude(params.driven_site())
    } else {
        Complex64::new(0.0, 0.0)
    };
    Ok(DriveSample {
        omega2,
        w_total: jc + omega2,
    })
}

/// Bloch-vector derivative under the complex field `w`: rotation about
/// `(-Im w, -Re w, 0)`.
#[inline]
pub fn bloch_derivative(w: Complex64, s: [f64; 3]) -> [f64; 3] {
    [-w.im * s[2], -w.re * s[2], w.re * s[1] + w.im * s[0]]
}

/// Laser-free hopping derivative on the flat amplitude block.
///
/// `d alpha_k / dt = -i J (alpha_{k+1} + alpha_{k-1})`, open boundaries.
#[inline]
fn hop_rhs_flat(hop: f64, y: &[f64], dy: &mut [f64], n: usize) {
    for k in 0..n {
        let (mut nr, mut ni) = (0.0, 0.0);
        if k > 0 {
            nr += y[2 * (k - 1)];
            ni += y[2 * (k - 1) + 1];
        }
        if k + 1 < n {
            nr += y[2 * (k + 1)];
            ni += y[2 * (k + 1) + 1];
        }
        // -i J (nr + i ni) = J ni - i J nr
        dy[2 * k] = hop * ni;
        dy[2 * k + 1] = -hop * nr;
    }
}

/// Hopping-only derivative; Bloch derivative zero.
pub fn free_rhs(state: &ChainState, params: &ChainParams) -> Result<ChainState, DynamicsError> {
    check_dims(state, params)?;
    let n = params.n_ions();
    let y = state.to_flat_vec();
    let mut dy = vec![0.0; y.len()];
    hop_rhs_flat(params.hop(), &y, &mut dy, n);
    Ok(ChainState::from_flat(&dy))
}

fn check_dims(state: &ChainState, params: &ChainParams) -> Result<(), DynamicsError> {
    if state.n_sites() != params.n_ions() {
        return Err(DynamicsError::DimensionMismatch {
            state: state.n_sites(),
            params: params.n_ions(),
        });
    }
    Ok(())
}

/// Full chain derivative on the flat state layout. This is the hot path
/// used by the integrators; `full_rhs` wraps it with typed state.
pub fn full_rhs_flat(
    t: f64,
    y: &[f64],
    dy: &mut [f64],
    params: &ChainParams,
    config: &DriveConfig,
    reference: Option<&dyn FreeReference>,
) -> Result<(), DynamicsError> {
    let n = params.n_ions();
    debug_assert_eq!(y.len(), 2 * n + 3);
    hop_rhs_flat(params.hop(), y, dy, n);

    let m = params.driven_site() - 1;
    let g = params.coupling();
    let s = [y[2 * n], y[2 * n + 1], y[2 * n + 2]];

    let omega2 = if config.carrier_on {
        match config.carrier_mode {
            CarrierMode::Constant(o) => o,
            CarrierMode::ReferenceTracking { phase } => {
                let reference = reference.ok_or(DynamicsError::MissingReference)?;
                g * reference.driven_site_amplitude(t) * Complex64::from_polar(1.0, phase)
            }
        }
    } else {
        Complex64::new(0.0, 0.0)
    };

    let mut w = omega2;
    if config.jc_on {
        w += g * Complex64::new(y[2 * m], y[2 * m + 1]);
        // back-action on the driven mode: -i (g/2) s-,
        // s- = (s_x - i s_y)/2, so re += -(g/4) s_y, im += -(g/4) s_x
        dy[2 * m] -= 0.25 * g * s[1];
        dy[2 * m + 1] -= 0.25 * g * s[0];
    }

    let ds = bloch_derivative(w, s);
    dy[2 * n..].copy_from_slice(&ds);
    Ok(())
}

/// Full chain derivative: hopping, sideband back-action, and carrier
/// drive, with terms dropped when the corresponding laser is off.
pub fn full_rhs(
    t: f64,
    state: &ChainState,
    params: &ChainParams,
    config: &DriveConfig,
    reference: Option<&dyn FreeReference>,
) -> Result<ChainState, DynamicsError> {
    check_dims(state, params)?;
    let y = state.to_flat_vec();
    let mut dy = vec![0.0; y.len()];
    full_rhs_flat(t, &y, &mut dy, params, config, reference)?;
    Ok(ChainState::from_flat(&dy))
}

/// Effective single-ion model: Bloch precession under
/// `W = omega_tilde + omega2` with the phonon amplitude held fixed.
pub fn single_ion_rhs(
    _t: f64,
    bloch: [f64; 3],
    omega_tilde: Complex64,
    omega2: Complex64,
) -> [f64; 3] {
    bloch_derivative(omega_tilde + omega2, bloch)
}

//! Semiclassical simulator for interference between light and mechanical
//! waves in driven trapped-ion chains.
//!
//! A phonon wave packet launched at one end of an ion chain hops between
//! neighbouring vibrational modes while two lasers address a single ion:
//! a sideband laser exchanging excitation between the motion and the
//! electronic state, and a resonantly modulated carrier. Depending on the
//! relative phase between the modulated carrier and the sideband
//! back-action, the two fields interfere constructively (doubling the
//! electronic excitation), destructively (leaving the ion transparent and
//! the wave packet undisturbed), or anywhere in between; for strong
//! sideband coupling the driven ion acts as a phonon-blockade filter.
//!
//! The crate integrates the mean-field equations of motion with adaptive
//! 5(4) Runge-Kutta methods (one explicit, one ESDIRK) and validates them
//! against closed-form and exact quantum oracles:
//!
//! * [`model`] - domain types, state construction, observables
//! * [`dynamics`] - equations of motion and the modulated carrier drive
//! * [`integrate`] - adaptive integrators, Newton stage solver, Jacobian
//! * [`oracle`] - eigenmode/Bessel/Rabi closed forms and truncated
//!   Fock-space quantum evolution
//! * [`experiments`] - scenario runners, sweeps, and derived metrics
//! * [`cli`] - configuration parsing, CSV and SVG emission, command-line
//!   front end
//!
//! ```
//! use ionchain::experiments::{run_single_ion, Scenario};
//! use ionchain::integrate::IntegratorSettings;
//! use num_complex::Complex64;
//!
//! // a transparent ion: the carrier exactly cancels the sideband drive
//! let result = run_single_ion(
//!     Scenario::Destructive,
//!     Complex64::new(-1.0, 0.0),
//!     1.0,
//!     10.0,
//!     101,
//!     &IntegratorSettings::default(),
//! )
//! .unwrap();
//! assert!(result.series.max_p_e() < 1e-9);
//! ```

// full-width float constants, formula-shaped index loops, and
// NaN-rejecting `!(x > 0)` guards are all deliberate here
#![allow(clippy::excessive_precision)]
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod experiments;
pub mod integrate;
pub mod model;
pub mod oracle;

pub use model::{ChainParams, ChainState, DriveConfig, TimeSeries};

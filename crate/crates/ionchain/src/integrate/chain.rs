//! Binding of the chain dynamics to the integrator: the analytic
//! Jacobian needed by the Newton stage solves and an [`OdeSystem`]
//! implementation over the flat state layout.

use num_complex::Complex64;

use super::{DenseMatrix, OdeSystem};
use crate::dynamics::{full_rhs_flat, DynamicsError, FreeReference};
use crate::model::{CarrierMode, ChainParams, ChainState, DriveConfig};

/// Analytic Jacobian of the full chain derivative in flat coordinates:
/// a banded hopping part plus a small dense block coupling the three
/// spin components with the driven site's two amplitude components.
///
/// The tracking carrier depends on `t` but not on the state, so it only
/// enters through the spin-spin entries.
pub fn chain_jacobian(
    t: f64,
    state: &ChainState,
    params: &ChainParams,
    config: &DriveConfig,
    reference: Option<&dyn FreeReference>,
) -> Result<DenseMatrix, DynamicsError> {
    if state.n_sites() != params.n_ions() {
        return Err(DynamicsError::DimensionMismatch {
            state: state.n_sites(),
            params: params.n_ions(),
        });
    }
    let n = params.n_ions();
    let mut jac = DenseMatrix::zeros(2 * n + 3);
    fill_chain_jacobian(t, &state.to_flat_vec(), params, config, reference, &mut jac)?;
    Ok(jac)
}

pub(crate) fn fill_chain_jacobian(
    t: f64,
    y: &[f64],
    params: &ChainParams,
    config: &DriveConfig,
    reference: Option<&dyn FreeReference>,
    jac: &mut DenseMatrix,
) -> Result<(), DynamicsError> {
    let n = params.n_ions();
    let hop = params.hop();
    let g = params.coupling();
    let m = params.driven_site() - 1;
    let (sx, sy, sz) = (2 * n, 2 * n + 1, 2 * n + 2);

    jac.fill_zero();

    // hopping band: d(re_k)/d(im_{k+-1}) = J, d(im_k)/d(re_{k+-1}) = -J
    for k in 0..n {
        if k > 0 {
            jac[(2 * k, 2 * (k - 1) + 1)] = hop;
            jac[(2 * k + 1, 2 * (k - 1))] = -hop;
        }
        if k + 1 < n {
            jac[(2 * k, 2 * (k + 1) + 1)] = hop;
            jac[(2 * k + 1, 2 * (k + 1))] = -hop;
        }
    }

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
        // back-action rows of the driven amplitude
        jac[(2 * m, sy)] = -0.25 * g;
        jac[(2 * m + 1, sx)] = -0.25 * g;
        // spin rows depend on the driven amplitude through W
        jac[(sx, 2 * m + 1)] = -g * y[sz];
        jac[(sy, 2 * m)] = -g * y[sz];
        jac[(sz, 2 * m)] = g * y[sy];
        jac[(sz, 2 * m + 1)] = g * y[sx];
    }

    // spin-spin block from ds = (-Im(W) s_z, -Re(W) s_z, Re(W) s_y + Im(W) s_x)
    jac[(sx, sz)] = -w.im;
    jac[(sy, sz)] = -w.re;
    jac[(sz, sx)] = w.im;
    jac[(sz, sy)] = w.re;
    Ok(())
}

/// Chain dynamics as a flat ODE system, with the analytic Jacobian wired
/// in for the implicit method.
pub struct ChainOde<'a> {
    params: &'a ChainParams,
    config: &'a DriveConfig,
    reference: Option<&'a dyn FreeReference>,
}

impl<'a> ChainOde<'a> {
    /// Fails if the drive is in tracking mode without a reference.
    pub fn new(
        params: &'a ChainParams,
        config: &'a DriveConfig,
        reference: Option<&'a dyn FreeReference>,
    ) -> Result<Self, DynamicsError> {
        if config.carrier_on
            && matches!(config.carrier_mode, CarrierMode::ReferenceTracking { .. })
            && reference.is_none()
        {
            return Err(DynamicsError::MissingReference);
        }
        Ok(Self {
            params,
            config,
            reference,
        })
    }
}

impl OdeSystem for ChainOde<'_> {
    fn dim(&self) -> usize {
        self.params.flat_dim()
    }

    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        full_rhs_flat(t, y, dy, self.params, self.config, self.reference)
            .expect("reference checked at construction");
    }

    fn jacobian(&self, t: f64, y: &[f64], out: &mut DenseMatrix) {
        fill_chain_jacobian(t, y, self.params, self.config, self.reference, out)
            .expect("reference checked at construction");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::FnReference;
    use crate::model::initial_state;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pseudo_random_state(n: usize, seed: u64) -> ChainState {
        let mut s = seed;
        let mut next = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let amplitudes = (0..n).map(|_| c(next(), next())).collect();
        ChainState::new(amplitudes, [next(), next(), next()])
    }

    #[test]
    fn no_drive_leaves_only_the_hopping_band() {
        let params = ChainParams::new(4).unwrap().with_hop(1.3).unwrap();
        let state = initial_state(&params);
        let jac = chain_jacobian(0.0, &state, &params, &DriveConfig::free(), None).unwrap();
        let n = 4;
        for i in 0..2 * n + 3 {
            for j in 0..2 * n + 3 {
                let expect = if i < 2 * n && j < 2 * n {
                    let (site_i, re_i) = (i / 2usize, i % 2 == 0);
                    let (site_j, re_j) = (j / 2usize, j % 2 == 0);
                    if site_i.abs_diff(site_j) == 1 && re_i && !re_j {
                        1.3
                    } else if site_i.abs_diff(site_j) == 1 && !re_i && re_j {
                        -1.3
                    } else {
                        0.0
                    }
                } else {
                    0.0
                };
                assert_eq!(jac[(i, j)], expect, "entry ({i}, {j})");
            }
        }
    }

    #[test]
    fn single_site_no_hop_is_the_local_block() {
        let params = ChainParams::new(1)
            .unwrap()
            .with_hop(0.0)
            .unwrap()
            .with_coupling(2.0)
            .unwrap();
        let state = pseudo_random_state(1, 42);
        let jac = chain_jacobian(0.0, &state, &params, &DriveConfig::jc_only(), None).unwrap();
        assert_eq!(jac.n(), 5);
        // hopping entries absent, local couplings present
        assert_eq!(jac[(0, 3)], -0.5); // -g/4
        assert_eq!(jac[(1, 2)], -0.5);
        assert_eq!(jac[(2, 1)], -2.0 * state.bloch()[2]);
    }

    /// Central finite differences against the analytic Jacobian on a
    /// random state with all drives on.
    #[test]
    fn finite_differences_agree() {
        let params = ChainParams::new(6)
            .unwrap()
            .with_coupling(1.7)
            .unwrap()
            .with_hop(0.9)
            .unwrap();
        let reference = FnReference(|t: f64| c(0.3 * (1.2 * t).cos(), -0.1 * t.sin()));
        let config = DriveConfig::tracking(0.7);
        let state = pseudo_random_state(6, 0xfeed);
        let t = 1.37;

        let jac = chain_jacobian(t, &state, &params, &config, Some(&reference)).unwrap();

        let y0 = state.to_flat_vec();
        let dim = y0.len();
        let h = 1e-6;
        let mut fd = DenseMatrix::zeros(dim);
        let mut fp = vec![0.0; dim];
        let mut fm = vec![0.0; dim];
        for j in 0..dim {
            let mut yp = y0.clone();
            yp[j] += h;
            let mut ym = y0.clone();
            ym[j] -= h;
            full_rhs_flat(t, &yp, &mut fp, &params, &config, Some(&reference)).unwrap();
            full_rhs_flat(t, &ym, &mut fm, &params, &config, Some(&reference)).unwrap();
            for i in 0..dim {
                fd[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let diff = jac.max_abs_diff(&fd);
        assert!(diff < 1e-6, "max |J_analytic - J_fd| = {diff}");
    }

    #[test]
    fn tracking_without_reference_fails_at_construction() {
        let params = ChainParams::new(3).unwrap();
        let config = DriveConfig::tracking(0.0);
        assert!(ChainOde::new(&params, &config, None).is_err());
    }
}

//! Independent ground-truth solvers used to validate the semiclassical
//! integration: the eigenmode closed form of the laser-free chain, the
//! infinite-chain Bessel limit, the resonant two-level closed form, and
//! exact quantum evolution in truncated Fock space (see [`fock`]).

pub mod fock;

pub use fock::{fock_single_ion, fock_tiny_chain, FockConfig, FockError};

use num_complex::Complex64;

use crate::dynamics::FreeReference;
use crate::model::ChainParams;

/// Eigenmodes of the open nearest-neighbour hopping chain:
/// `lambda_j = 2 J cos(j pi / (N+1))` with orthonormal shapes
/// `v_j(k) = sqrt(2/(N+1)) sin(j k pi / (N+1))`, `j, k = 1..N`.
#[derive(Debug, Clone)]
pub struct EigenmodeBasis {
    n_ions: usize,
    frequencies: Vec<f64>,
    /// mode_shapes[(j-1) * n + (k-1)] = v_j(k)
    mode_shapes: Vec<f64>,
}

impl EigenmodeBasis {
    pub fn new(n_ions: usize, hop: f64) -> Self {
        let n = n_ions;
        let norm = (2.0 / (n as f64 + 1.0)).sqrt();
        let mut frequencies = Vec::with_capacity(n);
        let mut mode_shapes = Vec::with_capacity(n * n);
        for j in 1..=n {
            let theta = j as f64 * std::f64::consts::PI / (n as f64 + 1.0);
            frequencies.push(2.0 * hop * theta.cos());
            for k in 1..=n {
                mode_shapes.push(norm * (k as f64 * theta).sin());
            }
        }
        Self {
            n_ions,
            frequencies,
            mode_shapes,
        }
    }

    pub fn n_ions(&self) -> usize {
        self.n_ions
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// `v_j(k)` with 1-based mode and site indices.
    pub fn shape(&self, j: usize, k: usize) -> f64 {
        self.mode_shapes[(j - 1) * self.n_ions + (k - 1)]
    }

    /// Largest deviation of `sum_k v_j(k) v_l(k)` from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.n_ions;
        let mut worst: f64 = 0.0;
        for j in 1..=n {
            for l in j..=n {
                let dot: f64 = (1..=n).map(|k| self.shape(j, k) * self.shape(l, k)).sum();
                let target = if j == l { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Closed-form propagator of the laser-free chain for the pulse launched
/// at site 1: `alpha_k(t) = sum_j v_j(k) exp(-i lambda_j t) v_j(1) alpha0`.
///
/// Also serves as the tracking-drive reference through [`FreeReference`]
/// (the exact closed form avoids coupling integration error into the
/// drive).
#[derive(Debug, Clone)]
pub struct EigenmodePropagator {
    basis: EigenmodeBasis,
    /// per-mode weight `v_j(1) * alpha0`
    weights: Vec<Complex64>,
    driven_site: usize,
}

impl EigenmodePropagator {
    pub fn new(params: &ChainParams) -> Self {
        let basis = EigenmodeBasis::new(params.n_ions(), params.hop());
        let weights = (1..=params.n_ions())
            .map(|j| basis.shape(j, 1) * params.alpha0())
            .collect();
        Self {
            basis,
            weights,
            driven_site: params.driven_site(),
        }
    }

    pub fn basis(&self) -> &EigenmodeBasis {
        &self.basis
    }

    /// Amplitude of one site at time `t` (1-based site index).
    pub fn amplitude_at(&self, site: usize, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, w) in self.weights.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -self.basis.frequencies[j] * t);
            acc += self.basis.shape(j + 1, site) * phase * w;
        }
        acc
    }

    /// All site amplitudes at time `t`.
    pub fn amplitudes_at(&self, t: f64) -> Vec<Complex64> {
        let n = self.basis.n_ions;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (j, w) in self.weights.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -self.basis.frequencies[j] * t) * w;
            let row = &self.basis.mode_shapes[j * n..(j + 1) * n];
            for (o, v) in out.iter_mut().zip(row) {
                *o += v * phase;
            }
        }
        out
    }
}

impl FreeReference for EigenmodePropagator {
    fn driven_site_amplitude(&self, t: f64) -> Complex64 {
        self.amplitude_at(self.driven_site, t)
    }
}

/// Laser-free chain amplitudes at time `t` (dimensionless, `hop` taken
/// from `params`).
pub fn eigenmode_propagate(params: &ChainParams, t: f64) -> Vec<Complex64> {
    EigenmodePropagator::new(params).amplitudes_at(t)
}

/// Bessel function of the first kind `J_n(x)` for `n >= 0, x >= 0`,
/// via Miller's downward recurrence with the even-order normalisation
/// `J_0 + 2 J_2 + 2 J_4 + ... = 1`. Accurate to well below 1e-10 in the
/// ranges this project uses.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    bessel_j_sequence(n, x)[n as usize]
}

/// `J_0(x) ..= J_{n_max}(x)` in one downward sweep.
pub fn bessel_j_sequence(n_max: u32, x: f64) -> Vec<f64> {
    let n_max = n_max as usize;
    if x == 0.0 {
        let mut out = vec![0.0; n_max + 1];
        out[0] = 1.0;
        return out;
    }
    // start far enough above both the order and the argument that the
    // dominant solution has decayed to roundoff
    let start = (n_max.max(x.ceil() as usize)) + 16 + (x.sqrt() as usize) * 4;
    let mut jp = 0.0_f64; // J_{k+1}
    let mut jc = 1e-300_f64; // J_k seed
    let mut out = vec![0.0; n_max + 1];
    let mut norm = 0.0_f64;
    for k in (0..=start).rev() {
        let jm = (2.0 * (k as f64 + 1.0) / x) * jc - jp;
        jp = jc;
        jc = jm;
        // jc now holds J_k (unnormalised)
        if k <= n_max {
            out[k] = jc;
        }
        if k % 2 == 0 {
            norm += if k == 0 { jc } else { 2.0 * jc };
        }
        // rescale to avoid overflow of the recurrence
        if jc.abs() > 1e280 {
            jc /= 1e280;
            jp /= 1e280;
            norm /= 1e280;
            for v in out.iter_mut() {
                *v /= 1e280;
            }
        }
    }
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

/// Infinite-chain limit of the transported amplitude: `|J_{k-1}(2 jt)|`,
/// the magnitude a pulse launched deep inside an unbounded chain would
/// have `k - 1` sites away.
pub fn bessel_amplitude(k: usize, jt: f64) -> f64 {
    assert!(k >= 1, "site index is 1-based");
    bessel_j(k as u32 - 1, 2.0 * jt).abs()
}

/// Closed-form amplitude at site `k` for a pulse launched at site 1 of a
/// semi-infinite chain: `|J_{k-1}(2 jt) + J_{k+1}(2 jt)|`.
///
/// The second term is the mirror image enforcing the open boundary next
/// to the launch site; it is NOT negligible once the wavefront has
/// passed (at the edge site it changes the decay law from `t^{-1/2}` to
/// `t^{-3/2}`), so this is the form that matches the finite chain to
/// high accuracy at early times.
pub fn bessel_edge_amplitude(k: usize, jt: f64) -> f64 {
    assert!(k >= 1, "site index is 1-based");
    let seq = bessel_j_sequence(k as u32 + 1, 2.0 * jt);
    (seq[k - 1] + seq[k + 1]).abs()
}

/// Resonant two-level closed form: ground-state start, constant real
/// drive `w`, excited population `sin^2(w t / 2)`.
pub fn rabi_closed_form(w: f64, t: f64) -> f64 {
    let s = (w * t / 2.0).sin();
    s * s
}

//! Explicit Dormand-Prince 5(4) pair: 7 stages, FSAL, 5th-order advance
//! with an embedded 4th-order error estimate. Serves as the non-stiff
//! workhorse and as an independent cross-check of the implicit method.

use super::{wrms_norm, Attempt, IntegratorSettings, OdeSystem, StepKernel, StepStats};

pub const RK54_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

pub const RK54_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

/// 5th-order weights (equal to the last row of `RK54_A`: FSAL).
pub const RK54_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];

/// Embedded 4th-order weights.
pub const RK54_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Stage weights of the 4th-order-accurate continuous extension (dense
/// output); stage 2 carries no weight.
pub const RK54_DENSE: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

pub(crate) struct Rk54Kernel {
    k: [Vec<f64>; 7],
    y_stage: Vec<f64>,
    y_new: Vec<f64>,
    err_vec: Vec<f64>,
    f0_valid: bool,
}

impl Rk54Kernel {
    pub fn new(dim: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; dim]),
            y_stage: vec![0.0; dim],
            y_new: vec![0.0; dim],
            err_vec: vec![0.0; dim],
            f0_valid: false,
        }
    }

    /// Dormand-Prince continuous extension, nested as
    /// `y0 + th (d1 + (1-th) (d2 + th (d3 + (1-th) d4)))` with the stage
    /// combination in `RK54_DENSE`; 4th-order accurate across the step.
    fn dense(&self, theta: f64, h: f64, y0: &[f64], out: &mut [f64]) {
        let theta1 = 1.0 - theta;
        for i in 0..out.len() {
            let delta = self.y_new[i] - y0[i];
            let r3 = h * self.k[0][i] - delta;
            let r4 = delta - h * self.k[6][i] - r3;
            let mut r5 = 0.0;
            for (j, kj) in self.k.iter().enumerate() {
                r5 += RK54_DENSE[j] * kj[i];
            }
            r5 *= h;
            out[i] = y0[i] + theta * (delta + theta1 * (r3 + theta * (r4 + theta1 * r5)));
        }
    }
}

impl<S: OdeSystem> StepKernel<S> for Rk54Kernel {
    fn attempt(
        &mut self,
        system: &S,
        t: f64,
        y: &[f64],
        h: f64,
        settings: &IntegratorSettings,
        stats: &mut StepStats,
    ) -> Attempt {
        let n = y.len();
        if !self.f0_valid {
            system.rhs(t, y, &mut self.k[0]);
            stats.rhs_evals += 1;
            self.f0_valid = true;
        }
        for i in 1..7 {
            for m in 0..n {
                let mut acc = 0.0;
                for (j, kj) in self.k.iter().enumerate().take(i) {
                    acc += RK54_A[i][j] * kj[m];
                }
                self.y_stage[m] = y[m] + h * acc;
            }
            let (head, tail) = self.k.split_at_mut(i);
            let _ = head;
            system.rhs(t + RK54_C[i] * h, &self.y_stage, &mut tail[0]);
            stats.rhs_evals += 1;
        }
        for m in 0..n {
            let mut y5 = 0.0;
            let mut e = 0.0;
            for (j, kj) in self.k.iter().enumerate() {
                y5 += RK54_B5[j] * kj[m];
                e += (RK54_B5[j] - RK54_B4[j]) * kj[m];
            }
            self.y_new[m] = y[m] + h * y5;
            self.err_vec[m] = h * e;
        }
        if let Some(component) = self
            .y_new
            .iter()
            .chain(self.err_vec.iter())
            .position(|v| !v.is_finite())
        {
            return Attempt::NonFinite {
                component: component % n,
            };
        }
        let err = wrms_norm(&self.err_vec, y, &self.y_new, settings.atol, settings.rtol);
        Attempt::Done { err }
    }

    fn y_new(&self) -> &[f64] {
        &self.y_new
    }

    fn interpolate(&self, theta: f64, h: f64, y0: &[f64], out: &mut [f64]) {
        self.dense(theta, h, y0, out);
    }

    fn accept(&mut self) {
        // FSAL: the last stage derivative is the first of the next step
        let k6 = self.k[6].clone();
        self.k[0].copy_from_slice(&k6);
        self.f0_valid = true;
    }

    fn reject(&mut self) {
        // k[0] is still f(t, y); keep it
    }
}

/// One explicit 5(4) step: returns the 5th-order solution and the
/// weighted RMS norm of the embedded error estimate.
pub fn rk54_step<S: OdeSystem>(
    system: &S,
    t: f64,
    y: &[f64],
    h: f64,
    settings: &IntegratorSettings,
) -> Result<(Vec<f64>, f64), super::IntegrateError> {
    let mut kernel = Rk54Kernel::new(system.dim());
    let mut stats = StepStats::default();
    match kernel.attempt(system, t, y, h, settings, &mut stats) {
        Attempt::Done { err } => Ok((kernel.y_new.clone(), err)),
        Attempt::NonFinite { component } => {
            Err(super::IntegrateError::NonFiniteState { component, t })
        }
        _ => unreachable!("explicit kernel has no implicit failure modes"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::FnSystem;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tableau_rows_sum_to_c() {
        for i in 0..7 {
            let sum: f64 = RK54_A[i].iter().sum();
            assert_abs_diff_eq!(sum, RK54_C[i], epsilon = 1e-15);
        }
        assert_abs_diff_eq!(RK54_B5.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(RK54_B4.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_rhs_is_identity_with_zero_error() {
        let system = FnSystem::new(2, |_t, _y, dy: &mut [f64]| dy.fill(0.0));
        let settings = IntegratorSettings::default();
        let (y, err) = rk54_step(&system, 0.0, &[1.0, 2.0], 0.7, &settings).unwrap();
        assert_eq!(y, vec![1.0, 2.0]);
        assert_eq!(err, 0.0);
    }

    #[test]
    fn constant_rhs_is_exact() {
        let system = FnSystem::new(1, |_t, _y, dy: &mut [f64]| dy[0] = 1.0);
        let settings = IntegratorSettings::default();
        let (y, err) = rk54_step(&system, 0.0, &[0.0], 0.5, &settings).unwrap();
        assert_abs_diff_eq!(y[0], 0.5, epsilon = 1e-15);
        // roundoff-level in weighted units (1.0 marks the tolerance)
        assert!(err < 1e-6);
    }

    #[test]
    fn polynomial_solutions_up_to_degree_five_are_exact() {
        // y(t) = t^5 solves y' = 5 t^4: within reach of a 5th-order method
        let system = FnSystem::new(1, |t, _y, dy: &mut [f64]| dy[0] = 5.0 * t.powi(4));
        let settings = IntegratorSettings::default();
        let (y, _) = rk54_step(&system, 0.0, &[0.0], 1.0, &settings).unwrap();
        assert_abs_diff_eq!(y[0], 1.0, epsilon = 1e-13);
    }

    /// Midpoint interpolation error must drop by about 2^5 when the step
    /// is halved: the continuous extension is a genuine 4th-order
    /// interpolant, not the cubic fallback (which would give 2^4).
    #[test]
    fn dense_output_has_fifth_order_local_error() {
        use crate::integrate::StepStats;
        let system = FnSystem::new(1, |t, y: &[f64], dy: &mut [f64]| dy[0] = -y[0] + t.sin());
        let settings = IntegratorSettings::default();
        let exact = |t: f64| {
            // y' = -y + sin t, y(0) = 1
            1.5 * (-t).exp() + 0.5 * (t.sin() - t.cos())
        };
        let mut errors = vec![];
        for h in [0.4, 0.2, 0.1] {
            let mut kernel = Rk54Kernel::new(1);
            let mut stats = StepStats::default();
            let y0 = [1.0];
            match kernel.attempt(&system, 0.0, &y0, h, &settings, &mut stats) {
                Attempt::Done { .. } => {}
                _ => panic!("step failed"),
            }
            let mut mid = [0.0];
            kernel.dense(0.5, h, &y0, &mut mid);
            errors.push((mid[0] - exact(0.5 * h)).abs());
        }
        let order1 = (errors[0] / errors[1]).log2();
        let order2 = (errors[1] / errors[2]).log2();
        assert!(
            order1 > 4.5 && order2 > 4.5,
            "observed orders {order1}, {order2}"
        );
    }

    #[test]
    fn one_step_error_scales_as_h_to_the_sixth() {
        // local error of the 5th-order solution on y' = -y
        let system = FnSystem::new(1, |_t, y: &[f64], dy: &mut [f64]| dy[0] = -y[0]);
        let settings = IntegratorSettings::default();
        let exact = |h: f64| (-h).exp();
        let (y1, _) = rk54_step(&system, 0.0, &[1.0], 0.2, &settings).unwrap();
        let (y2, _) = rk54_step(&system, 0.0, &[1.0], 0.1, &settings).unwrap();
        let e1 = (y1[0] - exact(0.2)).abs();
        let e2 = (y2[0] - exact(0.1)).abs();
        let order = (e1 / e2).log2();
        assert!((order - 6.0).abs() < 0.4, "observed local order {order}");
    }
}

//! Minimal dense linear algebra for the implicit stage solves: a
//! row-major matrix and an LU factorisation with partial pivoting.
//!
//! The chain Jacobian is banded plus a small dense border, but at the
//! sizes this simulator runs (a few hundred unknowns) a plain dense
//! solve is fast enough and much simpler.

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fill_zero(&mut self) {
        self.data.fill(0.0);
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// out = self * v
    pub fn mul_vec(&self, v: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            out[i] = self.row(i).iter().zip(v).map(|(a, b)| a * b).sum();
        }
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// LU factorisation with partial pivoting, stored in place.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

/// Factor `m`. Fails on a (numerically) singular matrix.
pub fn lu_factor(mut m: DenseMatrix) -> Result<LuFactors, SingularMatrix> {
    let n = m.n();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let mut pivot = col;
        let mut best = m[(col, col)].abs();
        for row in col + 1..n {
            let v = m[(row, col)].abs();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return Err(SingularMatrix { column: col });
        }
        if pivot != col {
            perm.swap(col, pivot);
            for j in 0..n {
                let a = m[(col, j)];
                m[(col, j)] = m[(pivot, j)];
                m[(pivot, j)] = a;
            }
        }
        let inv = 1.0 / m[(col, col)];
        for row in col + 1..n {
            let factor = m[(row, col)] * inv;
            m[(row, col)] = factor;
            if factor != 0.0 {
                for j in col + 1..n {
                    m[(row, j)] -= factor * m[(col, j)];
                }
            }
        }
    }
    Ok(LuFactors { lu: m, perm })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingularMatrix {
    pub column: usize,
}

impl std::fmt::Display for SingularMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "singular matrix at column {}", self.column)
    }
}

impl std::error::Error for SingularMatrix {}

impl LuFactors {
    /// Solve `A x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let n = self.lu.n();
        // apply permutation
        let mut x = vec![0.0; n];
        for i in 0..n {
            x[i] = b[self.perm[i]];
        }
        // forward substitution (unit lower)
        for i in 0..n {
            let row = self.lu.row(i);
            let mut sum = x[i];
            for (j, xv) in x.iter().enumerate().take(i) {
                sum -= row[j] * xv;
            }
            x[i] = sum;
        }
        // back substitution
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut sum = x[i];
            for (j, xv) in x.iter().enumerate().skip(i + 1) {
                sum -= row[j] * xv;
            }
            x[i] = sum / row[i];
        }
        b.copy_from_slice(&x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn solves_a_known_system() {
        let mut a = DenseMatrix::zeros(3);
        let rows = [[2.0, 1.0, -1.0], [-3.0, -1.0, 2.0], [-2.0, 1.0, 2.0]];
        for i in 0..3 {
            for j in 0..3 {
                a[(i, j)] = rows[i][j];
            }
        }
        let lu = lu_factor(a).unwrap();
        let mut b = [8.0, -11.0, -3.0];
        lu.solve(&mut b);
        // x = (2, 3, -1)
        assert_abs_diff_eq!(b[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b[1], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b[2], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn pivoting_handles_zero_on_diagonal() {
        let mut a = DenseMatrix::zeros(2);
        a[(0, 1)] = 1.0;
        a[(1, 0)] = 1.0;
        let lu = lu_factor(a).unwrap();
        let mut b = [3.0, 5.0];
        lu.solve(&mut b);
        assert_abs_diff_eq!(b[0], 5.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b[1], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut a = DenseMatrix::zeros(2);
        a[(0, 0)] = 1.0;
        a[(0, 1)] = 2.0;
        a[(1, 0)] = 2.0;
        a[(1, 1)] = 4.0;
        assert!(lu_factor(a).is_err());
    }

    #[test]
    fn random_residual_is_small() {
        // deterministic pseudo-random fill
        let n = 24;
        let mut seed = 0x2545f4914f6cdd1du64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut a = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = next();
            }
            a[(i, i)] += 2.0;
        }
        let x_true: Vec<f64> = (0..n).map(|_| next()).collect();
        let mut b = vec![0.0; n];
        a.mul_vec(&x_true, &mut b);
        let lu = lu_factor(a).unwrap();
        lu.solve(&mut b);
        for (xi, ti) in b.iter().zip(&x_true) {
            assert_abs_diff_eq!(xi, ti, epsilon = 1e-10);
        }
    }
}

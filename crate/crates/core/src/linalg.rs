//! Small dense matrix helpers: the covariance type, Cholesky and a
//! pivoted linear solve. Dimensions here are portfolio sizes, so nothing is
//! blocked or vectorized.

use crate::error::{Error, Result};

/// Relative pivot floor for the Cholesky positive-definiteness test.
const PIVOT_FLOOR: f64 = 1e-12;
const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// A symmetric positive-definite covariance matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariance {
    n: usize,
    data: Vec<f64>,
}

impl Covariance {
    /// Validates shape, symmetry (to 1e-12 relative) and positive
    /// definiteness.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Dimension("covariance matrix is empty".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "covariance row {} has {} entries, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::Dimension(format!(
                    "covariance entry ({}, {}) is not finite",
                    i + 1,
                    j + 1
                )));
            }
            data.extend_from_slice(row);
        }
        let cov = Self { n, data };
        cov.check_symmetric()?;
        cov.cholesky()?;
        Ok(cov)
    }

    /// Builds `C_ij = rho_ij sqrt(v_i v_j)` from variances and a uniform
    /// correlation.
    pub fn from_uniform_correlation(variances: &[f64], rho: f64) -> Result<Self> {
        let n = variances.len();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let r = if i == j { 1.0 } else { rho };
                        r * (variances[i] * variances[j]).sqrt()
                    })
                    .collect()
            })
            .collect();
        Self::new(rows)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { n, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// `C w`
    pub fn mul_vec(&self, w: &[f64]) -> Vec<f64> {
        self.data
            .chunks(self.n)
            .map(|row| row.iter().zip(w).map(|(c, x)| c * x).sum())
            .collect()
    }

    /// `wᵀ C w`
    pub fn quad_form(&self, w: &[f64]) -> f64 {
        self.mul_vec(w).iter().zip(w).map(|(cw, x)| cw * x).sum()
    }

    fn check_symmetric(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (self.get(i, j), self.get(j, i));
                let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
                if (a - b).abs() > SYMMETRY_TOLERANCE * scale {
                    return Err(Error::NotSymmetric(format!(
                        "entries ({0}, {1}) = {a} and ({1}, {0}) = {b} differ",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Lower Cholesky factor, row-major. Fails when a pivot drops below
    /// `1e-12` times the largest diagonal entry.
    pub fn cholesky(&self) -> Result<Vec<f64>> {
        let n = self.n;
        let max_diag = (0..n).map(|i| self.get(i, i)).fold(0.0_f64, f64::max);
        if !(max_diag > 0.0) {
            return Err(Error::NotPositiveDefinite("no positive diagonal entry".into()));
        }
        let floor = PIVOT_FLOOR * max_diag;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut pivot = self.get(j, j);
            for k in 0..j {
                pivot -= l[j * n + k] * l[j * n + k];
            }
            if !(pivot > floor) {
                return Err(Error::NotPositiveDefinite(format!(
                    "Cholesky pivot {} is {pivot:e} (threshold {floor:e})",
                    j + 1
                )));
            }
            let d = pivot.sqrt();
            l[j * n + j] = d;
            for i in (j + 1)..n {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / d;
            }
        }
        Ok(l)
    }
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` for a numerically singular system.
pub fn solve(mut a: Vec<f64>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))
            .expect("non-empty range");
        if a[pivot_row * n + col].abs() <= 1e-13 * scale {
            return None;
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
        }
        let p = a[col * n + col];
        for r in (col + 1)..n {
            let factor = a[r * n + col] / p;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[r * n + k] -= factor * a[col * n + k];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = b[r];
        for k in (r + 1)..n {
            s -= a[r * n + k] * x[k];
        }
        x[r] = s / a[r * n + r];
    }
    Some(x)
}

//! Dense symmetric positive-definite solves.

use crate::error::{Error, Result};

/// Lower-triangular Cholesky factor of a row-major `n x n` matrix.
#[derive(Clone, Debug)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    /// Factors `a = L Lᵀ`. Fails on a non-positive pivot.
    pub fn factor(a: &[f64], n: usize) -> Result<Cholesky> {
        assert_eq!(a.len(), n * n);
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = a[j * n + j];
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > 0.0) {
                return Err(Error::Factorization(format!("pivot {j} is {d:e}")));
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in j + 1..n {
                let mut s = a[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / d;
            }
        }
        Ok(Cholesky { n, l })
    }

    /// Factors `a + jitter·I`, retrying with `retries` extra increments of
    /// `jitter` when a pivot fails.
    pub fn factor_with_jitter(a: &[f64], n: usize, jitter: f64, retries: usize) -> Result<(Cholesky, f64)> {
        let mut added = 0.0;
        let mut work = a.to_vec();
        for attempt in 0..=retries {
            match Cholesky::factor(&work, n) {
                Ok(c) => return Ok((c, added)),
                Err(e) if attempt == retries => return Err(e),
                Err(_) => {
                    added += jitter;
                    for i in 0..n {
                        work[i * n + i] += jitter;
                    }
                }
            }
        }
        unreachable!()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.l[k * n + i] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn matches_lu(n in 1usize..8, seed in proptest::collection::vec(-1.0f64..1.0, 64), b in proptest::collection::vec(-5.0f64..5.0, 8)) {
            let m = DMatrix::from_fn(n, n, |i, j| seed[i * 8 + j]);
            let a = &m * m.transpose() + DMatrix::identity(n, n) * 0.5;
            let flat: Vec<f64> = (0..n * n).map(|k| a[(k / n, k % n)]).collect();
            let x = Cholesky::factor(&flat, n).unwrap().solve(&b[..n]);
            let oracle = a.lu().solve(&DVector::from_column_slice(&b[..n])).unwrap();
            for i in 0..n {
                prop_assert!((x[i] - oracle[i]).abs() < 1e-9 * (1.0 + oracle[i].abs()));
            }
        }
    }

    #[test]
    fn rejects_indefinite_then_jitters() {
        let a = [1.0, 1.0, 1.0, 1.0];
        assert!(Cholesky::factor(&a, 2).is_err());
        let (_, added) = Cholesky::factor_with_jitter(&a, 2, 1e-8, 3).unwrap();
        assert_eq!(added, 1e-8);
        assert!(Cholesky::factor_with_jitter(&[-1.0], 1, 1e-8, 3).is_err());
    }
}

use serde::{Deserialize, Serialize};

use super::linalg::{dot, sq_dist, Cholesky};
use crate::error::{Error, Result};

pub const DEFAULT_NOISE: f64 = 0.5;
const JITTER: f64 = 1e-8;
const JITTER_RETRIES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Kernel {
    /// `exp(-|x - x'|² / (2ℓ²))`.
    Rbf { length_scale: f64 },
    /// `x · x'`.
    Linear,
}

impl Kernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Rbf { length_scale } => (-sq_dist(a, b) / (2.0 * length_scale * length_scale)).exp(),
            Kernel::Linear => dot(a, b),
        }
    }

    /// RBF with length-scale equal to the median pairwise distance, or 1
    /// when every point coincides.
    pub fn rbf_median(x: &[Vec<f64>]) -> Kernel {
        let mut d: Vec<f64> = Vec::with_capacity(x.len() * x.len().saturating_sub(1) / 2);
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                d.push(sq_dist(&x[i], &x[j]).sqrt());
            }
        }
        d.sort_by(f64::total_cmp);
        let median = match d.len() {
            0 => 0.0,
            m if m % 2 == 1 => d[m / 2],
            m => (d[m / 2 - 1] + d[m / 2]) / 2.0,
        };
        Kernel::Rbf {
            length_scale: if median > 0.0 { median } else { 1.0 },
        }
    }
}

/// Gaussian-process posterior mean `K(x, X) (K(X, X) + σ² I)⁻¹ y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GprModel {
    pub kernel: Kernel,
    pub noise: f64,
    pub train_x: Vec<Vec<f64>>,
    pub alpha: Vec<f64>,
    /// Diagonal jitter that was needed for the factorization.
    pub jitter: f64,
}

impl GprModel {
    pub fn fit(x: &[Vec<f64>], y: &[f64], kernel: Kernel, noise: f64) -> Result<GprModel> {
        let n = x.len();
        if n == 0 || n != y.len() {
            return Err(Error::InvalidArgument(format!("need matching non-empty rows, got {n} and {}", y.len())));
        }
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = kernel.eval(&x[i], &x[j]);
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
            k[i * n + i] += noise * noise;
        }
        let (chol, jitter) = Cholesky::factor_with_jitter(&k, n, JITTER, JITTER_RETRIES)?;
        Ok(GprModel {
            kernel,
            noise,
            train_x: x.to_vec(),
            alpha: chol.solve(y),
            jitter,
        })
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.train_x
            .iter()
            .zip(&self.alpha)
            .map(|(xi, a)| self.kernel.eval(xi, row) * a)
            .sum()
    }
}

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::linalg::dot;
use crate::error::{Error, Result};

/// `y = w·x + b` fitted by least squares.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    /// Minimum-norm least squares on centered data, so rank-deficient
    /// designs still get a unique answer.
    pub fn fit(x: &[Vec<f64>], y: &[f64]) -> Result<LinearModel> {
        let n = x.len();
        if n < 2 || n != y.len() {
            return Err(Error::InvalidArgument(format!("need >= 2 matching rows, got {n} rows and {} targets", y.len())));
        }
        let d = x[0].len();
        let xm: Vec<f64> = (0..d).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
        let ym = y.iter().sum::<f64>() / n as f64;
        if d == 0 {
            return Ok(LinearModel { weights: vec![], intercept: ym });
        }
        let a = DMatrix::from_fn(n, d, |i, j| x[i][j] - xm[j]);
        let b = DVector::from_iterator(n, y.iter().map(|v| v - ym));
        let svd = a.svd(true, true);
        let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let eps = smax * 1e-12 * n.max(d) as f64;
        let w = svd.solve(&b, eps).map_err(|e| Error::Factorization(e.to_string()))?;
        let weights: Vec<f64> = w.iter().copied().collect();
        let intercept = ym - dot(&weights, &xm);
        Ok(LinearModel { weights, intercept })
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        dot(&self.weights, row) + self.intercept
    }
}

//! ε-insensitive support-vector regression solved by SMO.
//!
//! The dual has `2n` variables `β = (α, α*)` with labels `+1` and `-1`:
//!
//! ```text
//! min  ½ βᵀ Q β + pᵀ β   s.t.  yᵀ β = 0,  0 ≤ β ≤ C
//! Q_ij = y_i y_j K(x_i, x_j),  p = (ε - z, ε + z)
//! ```
//!
//! Working pairs are chosen with second-order information and the bias is
//! recovered from the free variables. The stopping tolerance on the maximal
//! KKT violation is tightened until the relative duality gap is small.

use serde::{Deserialize, Serialize};

use super::gpr::Kernel;
use super::linalg::dot;
use crate::error::{Error, Result};

pub const DEFAULT_C: f64 = 1.0;
pub const DEFAULT_EPSILON: f64 = 0.1;
/// Target relative duality gap.
pub const GAP_TOLERANCE: f64 = 1e-6;
/// Largest training set whose kernel matrix is precomputed.
pub const FULL_CACHE_ROWS: usize = 3000;

const TAU: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvrParams {
    pub c: f64,
    pub epsilon: f64,
    pub kernel: Kernel,
    pub max_iter: usize,
}

impl Default for SvrParams {
    fn default() -> Self {
        SvrParams {
            c: DEFAULT_C,
            epsilon: DEFAULT_EPSILON,
            kernel: Kernel::Linear,
            max_iter: 10_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SvrWeights {
    /// Explicit primal weights for the linear kernel.
    Linear(Vec<f64>),
    /// Support vectors with coefficients `α_i - α*_i`.
    Kernel { support: Vec<Vec<f64>>, coef: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvrModel {
    pub params: SvrParams,
    pub weights: SvrWeights,
    pub bias: f64,
    /// Dual objective `½ βᵀQβ + pᵀβ` at termination (minimization form).
    pub objective: f64,
    pub duality_gap: f64,
    pub iterations: usize,
    /// Final `β = (α, α*)`.
    pub dual: Vec<f64>,
}

struct KernelRows<'a> {
    x: &'a [Vec<f64>],
    kernel: Kernel,
    full: Option<Vec<f64>>,
}

impl<'a> KernelRows<'a> {
    fn new(x: &'a [Vec<f64>], kernel: Kernel) -> Self {
        let n = x.len();
        let full = (n <= FULL_CACHE_ROWS).then(|| {
            let mut k = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..=i {
                    let v = kernel.eval(&x[i], &x[j]);
                    k[i * n + j] = v;
                    k[j * n + i] = v;
                }
            }
            k
        });
        KernelRows { x, kernel, full }
    }

    fn row(&self, i: usize, out: &mut [f64]) {
        let n = self.x.len();
        match &self.full {
            Some(k) => out.copy_from_slice(&k[i * n..(i + 1) * n]),
            None => {
                for (j, o) in out.iter_mut().enumerate() {
                    *o = self.kernel.eval(&self.x[i], &self.x[j]);
                }
            }
        }
    }

    fn diag(&self, i: usize) -> f64 {
        match &self.full {
            Some(k) => k[i * self.x.len() + i],
            None => self.kernel.eval(&self.x[i], &self.x[i]),
        }
    }
}

struct Solver<'a> {
    n: usize,
    c: f64,
    p: Vec<f64>,
    y: Vec<f64>,
    beta: Vec<f64>,
    grad: Vec<f64>,
    qd: Vec<f64>,
    kernel: KernelRows<'a>,
    ki: Vec<f64>,
    kj: Vec<f64>,
}

impl Solver<'_> {
    fn label(&self, t: usize) -> f64 {
        self.y[t]
    }

    /// `Q_ts` for `t, s` in `0..2n` given the kernel row of `t mod n`.
    fn q(&self, t: usize, s: usize, krow: &[f64]) -> f64 {
        self.y[t] * self.y[s] * krow[s % self.n]
    }

    fn upper(&self, t: usize) -> bool {
        self.beta[t] >= self.c
    }

    fn lower(&self, t: usize) -> bool {
        self.beta[t] <= 0.0
    }

    /// Returns the working pair, or `None` when the maximal violation is
    /// below `eps`.
    fn select(&mut self, eps: f64) -> Option<(usize, usize)> {
        let m = 2 * self.n;
        let (mut gmax, mut gmax2) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut i = usize::MAX;
        for t in 0..m {
            if self.label(t) > 0.0 {
                if !self.upper(t) && -self.grad[t] >= gmax {
                    gmax = -self.grad[t];
                    i = t;
                }
            } else if !self.lower(t) && self.grad[t] >= gmax {
                gmax = self.grad[t];
                i = t;
            }
        }
        if i == usize::MAX {
            return None;
        }
        let mut ki = std::mem::take(&mut self.ki);
        self.kernel.row(i % self.n, &mut ki);
        let yi = self.label(i);
        let qdi = self.qd[i];
        let mut j = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..m {
            let qit = self.q(i, t, &ki);
            if self.label(t) > 0.0 {
                if !self.lower(t) {
                    let diff = gmax + self.grad[t];
                    gmax2 = gmax2.max(self.grad[t]);
                    if diff > 0.0 {
                        let quad = qdi + self.qd[t] - 2.0 * yi * qit;
                        let obj = -(diff * diff) / if quad > 0.0 { quad } else { TAU };
                        if obj <= best {
                            best = obj;
                            j = t;
                        }
                    }
                }
            } else if !self.upper(t) {
                let diff = gmax - self.grad[t];
                gmax2 = gmax2.max(-self.grad[t]);
                if diff > 0.0 {
                    let quad = qdi + self.qd[t] + 2.0 * yi * qit;
                    let obj = -(diff * diff) / if quad > 0.0 { quad } else { TAU };
                    if obj <= best {
                        best = obj;
                        j = t;
                    }
                }
            }
        }
        self.ki = ki;
        if gmax + gmax2 < eps || j == usize::MAX {
            return None;
        }
        Some((i, j))
    }

    fn update(&mut self, i: usize, j: usize) {
        let n = self.n;
        let c = self.c;
        let mut ki = std::mem::take(&mut self.ki);
        let mut kj = std::mem::take(&mut self.kj);
        self.kernel.row(i % n, &mut ki);
        self.kernel.row(j % n, &mut kj);
        let qij = self.q(i, j, &ki);
        let (old_i, old_j) = (self.beta[i], self.beta[j]);
        let (mut ai, mut aj) = (old_i, old_j);
        if self.y[i] != self.y[j] {
            let quad = (self.qd[i] + self.qd[j] + 2.0 * qij).max(TAU);
            let delta = (-self.grad[i] - self.grad[j]) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let quad = (self.qd[i] + self.qd[j] - 2.0 * qij).max(TAU);
            let delta = (self.grad[i] - self.grad[j]) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }
        self.beta[i] = ai;
        self.beta[j] = aj;
        let (di, dj) = (ai - old_i, aj - old_j);
        for t in 0..2 * n {
            self.grad[t] += self.q(i, t, &ki) * di + self.q(j, t, &kj) * dj;
        }
        self.ki = ki;
        self.kj = kj;
    }

    fn rho(&self) -> f64 {
        let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut free, mut sum) = (0usize, 0.0);
        for t in 0..2 * self.n {
            let yg = self.y[t] * self.grad[t];
            if self.upper(t) {
                if self.y[t] < 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else if self.lower(t) {
                if self.y[t] > 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                free += 1;
                sum += yg;
            }
        }
        if free > 0 {
            sum / free as f64
        } else {
            (ub + lb) / 2.0
        }
    }

    fn objective(&self) -> f64 {
        self.beta.iter().zip(self.grad.iter().zip(&self.p)).map(|(b, (g, p))| b * (g + p)).sum::<f64>() / 2.0
    }

    /// Primal objective at `(θ, bias)` and the relative gap to the dual.
    fn gap(&self, z: &[f64], epsilon: f64, bias: f64) -> (f64, f64) {
        let n = self.n;
        // (Kθ)_i recovered from the gradient of the α block.
        let k_theta: Vec<f64> = (0..n).map(|i| self.grad[i] - epsilon + z[i]).collect();
        let theta: Vec<f64> = (0..n).map(|i| self.beta[i] - self.beta[i + n]).collect();
        let w2 = dot(&theta, &k_theta);
        let loss: f64 = (0..n).map(|i| ((z[i] - k_theta[i] - bias).abs() - epsilon).max(0.0)).sum();
        let primal = 0.5 * w2 + self.c * loss;
        let dual = -self.objective();
        let gap = primal - dual;
        (primal, gap / primal.abs().max(1.0))
    }
}

impl SvrModel {
    pub fn fit(x: &[Vec<f64>], z: &[f64], params: &SvrParams) -> Result<SvrModel> {
        let n = x.len();
        if n < 2 || n != z.len() {
            return Err(Error::InvalidArgument(format!("need >= 2 matching rows, got {n} and {}", z.len())));
        }
        if !(params.c > 0.0 && params.epsilon >= 0.0) {
            return Err(Error::InvalidArgument("C must be positive and epsilon nonnegative".into()));
        }
        let kernel = KernelRows::new(x, params.kernel);
        let qd: Vec<f64> = (0..2 * n).map(|t| kernel.diag(t % n)).collect();
        let p: Vec<f64> = (0..n).map(|i| params.epsilon - z[i]).chain((0..n).map(|i| params.epsilon + z[i])).collect();
        let y: Vec<f64> = (0..2 * n).map(|t| if t < n { 1.0 } else { -1.0 }).collect();
        let mut s = Solver {
            n,
            c: params.c,
            grad: p.clone(),
            p,
            y,
            beta: vec![0.0; 2 * n],
            qd,
            kernel,
            ki: vec![0.0; n],
            kj: vec![0.0; n],
        };

        let mut eps = 1e-3;
        let mut iterations = 0;
        let (bias, gap) = loop {
            while let Some((i, j)) = s.select(eps) {
                if iterations >= params.max_iter {
                    let bias = -s.rho();
                    let (_, gap) = s.gap(z, params.epsilon, bias);
                    return Err(Error::NonConvergence {
                        iterations,
                        residual: gap,
                    });
                }
                s.update(i, j);
                iterations += 1;
            }
            let bias = -s.rho();
            let (_, gap) = s.gap(z, params.epsilon, bias);
            if gap <= GAP_TOLERANCE || eps < 1e-14 {
                break (bias, gap);
            }
            eps /= 10.0;
        };

        let coef: Vec<f64> = (0..n).map(|i| s.beta[i] - s.beta[i + n]).collect();
        let weights = match params.kernel {
            Kernel::Linear => {
                let d = x[0].len();
                let mut w = vec![0.0; d];
                for (row, c) in x.iter().zip(&coef) {
                    for (wk, xk) in w.iter_mut().zip(row) {
                        *wk += c * xk;
                    }
                }
                SvrWeights::Linear(w)
            }
            Kernel::Rbf { .. } => {
                let keep: Vec<usize> = (0..n).filter(|&i| coef[i] != 0.0).collect();
                SvrWeights::Kernel {
                    support: keep.iter().map(|&i| x[i].clone()).collect(),
                    coef: keep.iter().map(|&i| coef[i]).collect(),
                }
            }
        };
        Ok(SvrModel {
            params: *params,
            weights,
            bias,
            objective: s.objective(),
            duality_gap: gap,
            iterations,
            dual: s.beta,
        })
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let f = match &self.weights {
            SvrWeights::Linear(w) => dot(w, row),
            SvrWeights::Kernel { support, coef } => support
                .iter()
                .zip(coef)
                .map(|(sv, c)| c * self.params.kernel.eval(sv, row))
                .sum(),
        };
        f + self.bias
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_slope() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![-2.0 + 4.0 * i as f64 / 19.0]).collect();
        let z: Vec<f64> = x.iter().map(|r| 3.0 * r[0]).collect();
        let m = SvrModel::fit(&x, &z, &SvrParams::default()).unwrap();
        let slope = m.predict_row(&[1.0]) - m.predict_row(&[0.0]);
        assert!((2.9..=3.1).contains(&slope), "slope {slope}");
        assert!(m.duality_gap <= GAP_TOLERANCE);
    }

    #[test]
    fn constant_targets_give_flat_model() {
        let x: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64, (i % 3) as f64]).collect();
        let m = SvrModel::fit(&x, &[4.0; 8], &SvrParams::default()).unwrap();
        assert!(matches!(&m.weights, SvrWeights::Linear(w) if w.iter().all(|v| *v == 0.0)));
        assert!((m.bias - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rbf_fits_nonlinear_curve() {
        let x: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64 / 5.0]).collect();
        let z: Vec<f64> = x.iter().map(|r| r[0].sin()).collect();
        let params = SvrParams {
            c: 10.0,
            kernel: Kernel::Rbf { length_scale: 1.0 },
            ..Default::default()
        };
        let m = SvrModel::fit(&x, &z, &params).unwrap();
        for (r, t) in x.iter().zip(&z) {
            assert!((m.predict_row(r) - t).abs() < 0.15);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SvrModel::fit(&[vec![1.0]], &[1.0], &SvrParams::default()).is_err());
        let bad = SvrParams { c: 0.0, ..Default::default() };
        assert!(SvrModel::fit(&[vec![1.0], vec![2.0]], &[1.0, 2.0], &bad).is_err());
    }
}

//! Reference ε-SVR solution from a generic interior-point QP solver.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT};
use early_citers::models::Kernel;

pub struct QpSvr {
    pub objective: f64,
    pub coef: Vec<f64>,
    pub bias: f64,
    pub x: Vec<Vec<f64>>,
    pub kernel: Kernel,
}

impl QpSvr {
    pub fn predict(&self, row: &[f64]) -> f64 {
        self.x.iter().zip(&self.coef).map(|(xi, c)| c * self.kernel.eval(xi, row)).sum::<f64>() + self.bias
    }
}

/// Minimizes `½ βᵀ [K -K; -K K] β + pᵀβ` with `Σα = Σα*`, `0 ≤ β ≤ C`.
pub fn solve(x: &[Vec<f64>], z: &[f64], c: f64, eps: f64, kernel: Kernel) -> QpSvr {
    let n = x.len();
    let m = 2 * n;
    let k: Vec<Vec<f64>> = x.iter().map(|a| x.iter().map(|b| kernel.eval(a, b)).collect()).collect();
    let p_dense: Vec<Vec<f64>> = (0..m)
        .map(|s| {
            (0..m)
                .map(|t| {
                    let sign = if (s < n) == (t < n) { 1.0 } else { -1.0 };
                    sign * k[s % n][t % n]
                })
                .collect()
        })
        .collect();
    let p = CscMatrix::from(&p_dense).to_triu();
    let q: Vec<f64> = (0..n).map(|i| eps - z[i]).chain((0..n).map(|i| eps + z[i])).collect();

    let mut a_dense = vec![vec![0.0; m]; 1 + 2 * m];
    let mut b = vec![0.0; 1 + 2 * m];
    for t in 0..m {
        a_dense[0][t] = if t < n { 1.0 } else { -1.0 };
        a_dense[1 + t][t] = -1.0;
        a_dense[1 + m + t][t] = 1.0;
        b[1 + m + t] = c;
    }
    let a = CscMatrix::from(&a_dense);
    let cones = [SupportedConeT::ZeroConeT(1), SupportedConeT::NonnegativeConeT(2 * m)];
    let settings = DefaultSettingsBuilder::default()
        .verbose(false)
        .tol_gap_abs(1e-10)
        .tol_gap_rel(1e-10)
        .tol_feas(1e-10)
        .max_iter(500)
        .build()
        .unwrap();
    let mut solver = DefaultSolver::new(&p, &q, &a, &b, &cones, settings).unwrap();
    solver.solve();
    assert!(
        matches!(solver.solution.status, SolverStatus::Solved | SolverStatus::AlmostSolved),
        "QP status {:?}",
        solver.solution.status
    );
    let beta = solver.solution.x.clone();
    let coef: Vec<f64> = (0..n).map(|i| beta[i] - beta[i + n]).collect();
    let k_theta: Vec<f64> = (0..n).map(|i| (0..n).map(|j| k[i][j] * coef[j]).sum()).collect();

    // Bias from the KKT conditions of free variables.
    let margin = 1e-6 * c;
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 0..n {
        if beta[i] > margin && beta[i] < c - margin {
            sum += z[i] - eps - k_theta[i];
            count += 1;
        }
        if beta[i + n] > margin && beta[i + n] < c - margin {
            sum += z[i] + eps - k_theta[i];
            count += 1;
        }
    }
    let bias = if count > 0 {
        sum / count as f64
    } else {
        // No free variable: midpoint of the feasible interval.
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..n {
            let r = z[i] - k_theta[i];
            if beta[i] <= margin {
                hi = hi.min(r + eps);
            } else {
                lo = lo.max(r - eps);
            }
            if beta[i + n] <= margin {
                lo = lo.max(r - eps);
            } else {
                hi = hi.min(r + eps);
            }
        }
        (lo + hi) / 2.0
    };
    QpSvr {
        objective: solver.solution.obj_val,
        coef,
        bias,
        x: x.to_vec(),
        kernel,
    }
}

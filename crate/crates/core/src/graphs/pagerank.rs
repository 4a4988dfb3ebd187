use serde::{Deserialize, Serialize};

use super::Adjacency;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PageRankOptions {
    pub damping: f64,
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for PageRankOptions {
    fn default() -> Self {
        PageRankOptions {
            damping: 0.85,
            tolerance: 1e-10,
            max_iter: 200,
        }
    }
}

/// Stationary scores indexed by local node, with run diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralityScores {
    pub scores: Vec<f64>,
    pub damping: f64,
    pub tolerance: f64,
    pub iterations: usize,
    pub residual: f64,
}

impl CentralityScores {
    pub fn get(&self, node: usize) -> f64 {
        self.scores[node]
    }
}

/// Weighted PageRank by power iteration.
///
/// Transition probabilities are proportional to out-edge weight. Mass on
/// dangling nodes is redistributed uniformly, so scores always sum to 1.
/// Convergence is declared when the L1 change between iterations drops
/// below `tolerance`.
pub fn pagerank(g: &impl Adjacency, opts: &PageRankOptions) -> Result<CentralityScores> {
    let d = opts.damping;
    if !(0.0..1.0).contains(&d) {
        return Err(Error::InvalidArgument(format!("damping {d} outside [0, 1)")));
    }
    let n = g.node_count();
    if n == 0 {
        return Ok(CentralityScores {
            scores: Vec::new(),
            damping: d,
            tolerance: opts.tolerance,
            iterations: 0,
            residual: 0.0,
        });
    }

    let mut out_weight = vec![0.0; n];
    for (u, w) in out_weight.iter_mut().enumerate() {
        g.for_each_out(u, &mut |_, x| *w += x);
    }

    let nf = n as f64;
    let mut x = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iter in 1..=opts.max_iter {
        let dangling: f64 = (0..n).filter(|&u| out_weight[u] <= 0.0).map(|u| x[u]).sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        next.iter_mut().for_each(|v| *v = base);
        for u in 0..n {
            if out_weight[u] > 0.0 {
                let share = d * x[u] / out_weight[u];
                g.for_each_out(u, &mut |v, w| next[v] += share * w);
            }
        }
        residual = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if residual < opts.tolerance {
            return Ok(CentralityScores {
                scores: x,
                damping: d,
                tolerance: opts.tolerance,
                iterations: iter,
                residual,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        residual,
    })
}

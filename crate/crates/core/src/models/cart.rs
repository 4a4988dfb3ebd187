use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_MAX_DEPTH: usize = 10;
pub const DEFAULT_MIN_LEAF: usize = 5;

/// Relative slack under which two split gains count as tied.
const TIE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    /// Reduction in the sum of squared deviations.
    pub gain: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf { value: f64, n: usize },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

/// Regression tree; rows with `x[feature] <= threshold` go left.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
    pub max_depth: usize,
    pub min_leaf: usize,
}

fn sse(y: &[f64], rows: &[usize]) -> f64 {
    let n = rows.len() as f64;
    let mean = rows.iter().map(|&i| y[i]).sum::<f64>() / n;
    rows.iter().map(|&i| (y[i] - mean) * (y[i] - mean)).sum()
}

/// Best SSE-reducing split of `rows` with both sides holding at least
/// `min_leaf` rows. Thresholds are midpoints between consecutive distinct
/// values; ties prefer the lower feature index, then the lower threshold.
pub fn best_split(x: &[Vec<f64>], y: &[f64], rows: &[usize], min_leaf: usize) -> Option<Split> {
    let n = rows.len();
    if n < 2 * min_leaf.max(1) {
        return None;
    }
    let d = x[rows[0]].len();
    let total: f64 = rows.iter().map(|&i| y[i]).sum();
    let parent = sse(y, rows);
    let mut best: Option<Split> = None;
    let mut order = rows.to_vec();
    for f in 0..d {
        order.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
        let mut left = 0.0;
        let mut left_sq = 0.0;
        let total_sq: f64 = order.iter().map(|&i| y[i] * y[i]).sum();
        for k in 0..n - 1 {
            let yi = y[order[k]];
            left += yi;
            left_sq += yi * yi;
            let nl = k + 1;
            let (lo, hi) = (x[order[k]][f], x[order[k + 1]][f]);
            if nl < min_leaf.max(1) || n - nl < min_leaf.max(1) || lo == hi {
                continue;
            }
            let nr = (n - nl) as f64;
            let right = total - left;
            let sse_l = left_sq - left * left / nl as f64;
            let sse_r = (total_sq - left_sq) - right * right / nr;
            let gain = parent - (sse_l + sse_r).max(0.0);
            let threshold = lo + (hi - lo) / 2.0;
            if best.is_none_or(|b| gain > b.gain + TIE * parent.abs().max(1.0)) {
                best = Some(Split { feature: f, threshold, gain });
            }
        }
    }
    best.filter(|b| b.gain > TIE * parent.abs().max(1.0))
}

impl Tree {
    pub fn fit(x: &[Vec<f64>], y: &[f64], max_depth: usize, min_leaf: usize) -> Result<Tree> {
        if x.is_empty() || x.len() != y.len() {
            return Err(Error::InvalidArgument(format!("need matching non-empty rows, got {} and {}", x.len(), y.len())));
        }
        let mut tree = Tree {
            nodes: Vec::new(),
            max_depth,
            min_leaf,
        };
        let rows: Vec<usize> = (0..x.len()).collect();
        tree.grow(x, y, rows, 0);
        Ok(tree)
    }

    fn grow(&mut self, x: &[Vec<f64>], y: &[f64], rows: Vec<usize>, depth: usize) -> usize {
        let id = self.nodes.len();
        let value = rows.iter().map(|&i| y[i]).sum::<f64>() / rows.len() as f64;
        self.nodes.push(Node::Leaf { value, n: rows.len() });
        if depth >= self.max_depth {
            return id;
        }
        let Some(s) = best_split(x, y, &rows, self.min_leaf) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x[i][s.feature] <= s.threshold);
        let left = self.grow(x, y, l, depth + 1);
        let right = self.grow(x, y, r, depth + 1);
        self.nodes[id] = Node::Split {
            feature: s.feature,
            threshold: s.threshold,
            left,
            right,
        };
        id
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value, .. } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Every midpoint of every feature, scored by recomputing both sides.
    fn exhaustive(x: &[Vec<f64>], y: &[f64], min_leaf: usize) -> Option<(usize, f64)> {
        let rows: Vec<usize> = (0..x.len()).collect();
        let parent = sse(y, &rows);
        let mut best: Option<(usize, f64, f64)> = None;
        for f in 0..x[0].len() {
            let mut vals: Vec<f64> = x.iter().map(|r| r[f]).collect();
            vals.sort_by(f64::total_cmp);
            vals.dedup();
            for w in vals.windows(2) {
                let t = w[0] + (w[1] - w[0]) / 2.0;
                let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x[i][f] <= t);
                if l.len() < min_leaf || r.len() < min_leaf {
                    continue;
                }
                let gain = parent - sse(y, &l) - sse(y, &r);
                if best.is_none_or(|b| gain > b.2 + TIE * parent.abs().max(1.0)) {
                    best = Some((f, t, gain));
                }
            }
        }
        best.filter(|b| b.2 > TIE * parent.abs().max(1.0)).map(|b| (b.0, b.1))
    }

    #[test]
    fn depth_zero_is_mean() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let t = Tree::fit(&x, &y, 0, 5).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.predict_row(&[100.0]), 4.5);
    }

    #[test]
    fn step_function() {
        let x: Vec<Vec<f64>> = (-6..6).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (-6..6).map(|i| if i < 0 { 0.0 } else { 10.0 }).collect();
        let t = Tree::fit(&x, &y, 10, 5).unwrap();
        assert_eq!(t.depth(), 1);
        assert!(matches!(t.nodes[0], Node::Split { feature: 0, threshold, .. } if threshold == -0.5));
        for (xi, yi) in x.iter().zip(&y) {
            assert_eq!(t.predict_row(xi), *yi);
        }
    }

    #[test]
    fn six_point_split_matches_enumeration() {
        let x = vec![vec![1.0, 5.0], vec![2.0, 3.0], vec![3.0, 4.0], vec![4.0, 1.0], vec![5.0, 2.0], vec![6.0, 6.0]];
        let y = [1.0, 1.2, 0.9, 7.0, 7.5, 2.0];
        let rows: Vec<usize> = (0..6).collect();
        let s = best_split(&x, &y, &rows, 1).unwrap();
        assert_eq!(Some((s.feature, s.threshold)), exhaustive(&x, &y, 1));
    }

    proptest! {
        #[test]
        fn split_matches_enumeration(
            rows in proptest::collection::vec((0u8..6, 0u8..6, -5.0f64..5.0), 2..=10),
            min_leaf in 1usize..3,
        ) {
            let x: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.0 as f64, r.1 as f64]).collect();
            let y: Vec<f64> = rows.iter().map(|r| r.2).collect();
            let idx: Vec<usize> = (0..x.len()).collect();
            let got = best_split(&x, &y, &idx, min_leaf).map(|s| (s.feature, s.threshold));
            prop_assert_eq!(got, exhaustive(&x, &y, min_leaf));
        }

        #[test]
        fn training_error_monotone_in_depth(ys in proptest::collection::vec(-5.0f64..5.0, 12..40)) {
            let x: Vec<Vec<f64>> = ys.iter().enumerate().map(|(i, _)| vec![i as f64, (i * 7 % 5) as f64]).collect();
            let err = |d| {
                let t = Tree::fit(&x, &ys, d, 2).unwrap();
                x.iter().zip(&ys).map(|(r, y)| (t.predict_row(r) - y).powi(2)).sum::<f64>()
            };
            let mut prev = f64::INFINITY;
            for d in 0..6 {
                let e = err(d);
                prop_assert!(e <= prev + 1e-9);
                prev = e;
            }
        }
    }
}

//! The four citation-count regressors and their evaluation metrics.
//!
//! Every trained model carries a [`Scaler`]. SVR and GPR standardize their
//! inputs; LR and CART get an identity scaler since they are insensitive to
//! feature scale.

mod cart;
mod gpr;
pub mod linalg;
mod linear;
mod metrics;
mod scaler;
mod svr;

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use cart::{best_split, Node, Split, Tree, DEFAULT_MAX_DEPTH, DEFAULT_MIN_LEAF};
pub use gpr::{GprModel, Kernel, DEFAULT_NOISE};
pub use linear::LinearModel;
pub use metrics::{pearson, r_squared, Metrics, R2Variant};
pub use scaler::Scaler;
pub use svr::{SvrModel, SvrParams, SvrWeights, DEFAULT_C, DEFAULT_EPSILON, GAP_TOLERANCE};

use crate::error::{Error, Result};
use crate::persist;

const MAGIC: &[u8; 8] = b"ECMODEL\0";
const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ModelKind {
    Lr,
    Gpr,
    Cart,
    Svr,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Lr, ModelKind::Gpr, ModelKind::Cart, ModelKind::Svr];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Lr => "LR",
            ModelKind::Gpr => "GPR",
            ModelKind::Cart => "CART",
            ModelKind::Svr => "SVR",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<ModelKind> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown model kind {s:?} (expected LR, GPR, CART or SVR)")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparams {
    /// `None` picks an RBF kernel with the median-distance length scale.
    pub gpr_kernel: Option<Kernel>,
    pub gpr_noise: f64,
    pub cart_max_depth: usize,
    pub cart_min_leaf: usize,
    pub svr: SvrParams,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            gpr_kernel: None,
            gpr_noise: DEFAULT_NOISE,
            cart_max_depth: DEFAULT_MAX_DEPTH,
            cart_min_leaf: DEFAULT_MIN_LEAF,
            svr: SvrParams::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Regressor {
    Lr(LinearModel),
    Gpr(GprModel),
    Cart(Tree),
    Svr(SvrModel),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub kind: ModelKind,
    pub scaler: Scaler,
    pub regressor: Regressor,
    pub hyperparams: Hyperparams,
    pub seed: u64,
    pub n_train: usize,
}

fn check_rows(x: &[Vec<f64>], y: &[f64]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!("{} rows but {} targets", x.len(), y.len())));
    }
    let d = x.first().map_or(0, Vec::len);
    if let Some(r) = x.iter().position(|r| r.len() != d) {
        return Err(Error::InvalidArgument(format!("row {r} has {} features, expected {d}", x[r].len())));
    }
    if x.iter().flatten().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite value in training data".into()));
    }
    Ok(d)
}

/// Trains `kind` with the given hyperparameters. `seed` is recorded for
/// provenance; every trainer is deterministic.
pub fn train(kind: ModelKind, x: &[Vec<f64>], y: &[f64], hp: &Hyperparams, seed: u64) -> Result<TrainedModel> {
    let d = check_rows(x, y)?;
    let (scaler, regressor) = match kind {
        ModelKind::Lr => (Scaler::identity(d), Regressor::Lr(LinearModel::fit(x, y)?)),
        ModelKind::Cart => {
            if x.len() < hp.cart_min_leaf.max(1) {
                return Err(Error::InvalidArgument(format!(
                    "{} rows is fewer than min_leaf {}",
                    x.len(),
                    hp.cart_min_leaf
                )));
            }
            (Scaler::identity(d), Regressor::Cart(Tree::fit(x, y, hp.cart_max_depth, hp.cart_min_leaf)?))
        }
        ModelKind::Gpr => {
            let scaler = Scaler::fit(x);
            let xs = scaler.transform(x);
            let kernel = hp.gpr_kernel.unwrap_or_else(|| Kernel::rbf_median(&xs));
            (scaler, Regressor::Gpr(GprModel::fit(&xs, y, kernel, hp.gpr_noise)?))
        }
        ModelKind::Svr => {
            let scaler = Scaler::fit(x);
            let xs = scaler.transform(x);
            (scaler, Regressor::Svr(SvrModel::fit(&xs, y, &hp.svr)?))
        }
    };
    Ok(TrainedModel {
        kind,
        scaler,
        regressor,
        hyperparams: *hp,
        seed,
        n_train: x.len(),
    })
}

pub fn train_lr(x: &[Vec<f64>], y: &[f64]) -> Result<TrainedModel> {
    train(ModelKind::Lr, x, y, &Hyperparams::default(), 0)
}

pub fn train_gpr(x: &[Vec<f64>], y: &[f64], kernel: Option<Kernel>, sigma: f64) -> Result<TrainedModel> {
    let hp = Hyperparams {
        gpr_kernel: kernel,
        gpr_noise: sigma,
        ..Default::default()
    };
    train(ModelKind::Gpr, x, y, &hp, 0)
}

pub fn train_cart(x: &[Vec<f64>], y: &[f64], max_depth: usize, min_leaf: usize) -> Result<TrainedModel> {
    let hp = Hyperparams {
        cart_max_depth: max_depth,
        cart_min_leaf: min_leaf,
        ..Default::default()
    };
    train(ModelKind::Cart, x, y, &hp, 0)
}

pub fn train_svr(x: &[Vec<f64>], y: &[f64], params: &SvrParams) -> Result<TrainedModel> {
    let hp = Hyperparams {
        svr: *params,
        ..Default::default()
    };
    train(ModelKind::Svr, x, y, &hp, 0)
}

impl TrainedModel {
    pub fn dim(&self) -> usize {
        self.scaler.dim()
    }

    /// Raw prediction for one feature row.
    pub fn predict_row(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "{} model expects {} features, got {}",
                self.kind,
                self.dim(),
                row.len()
            )));
        }
        let r = self.scaler.transform_row(row);
        Ok(match &self.regressor {
            Regressor::Lr(m) => m.predict_row(&r),
            Regressor::Gpr(m) => m.predict_row(&r),
            Regressor::Cart(m) => m.predict_row(&r),
            Regressor::Svr(m) => m.predict_row(&r),
        })
    }

    /// Predictions for many rows; `clamp` maps negative counts to 0.
    pub fn predict(&self, x: &[Vec<f64>], clamp: bool) -> Result<Vec<f64>> {
        x.iter()
            .map(|r| self.predict_row(r).map(|v| if clamp { v.max(0.0) } else { v }))
            .collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        persist::save(path, MAGIC, VERSION, self)
    }

    pub fn load(path: &Path) -> Result<TrainedModel> {
        persist::load(path, MAGIC, VERSION)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> (Vec<Vec<f64>>, Vec<f64>) {
        let x: Vec<Vec<f64>> = (0..12).map(|i| vec![i as f64, ((i * 5) % 7) as f64, 3.0]).collect();
        let y = x.iter().map(|r| 2.0 * r[0] - r[1] + 1.0).collect();
        (x, y)
    }

    #[test]
    fn kinds_parse() {
        for k in ModelKind::ALL {
            assert_eq!(k.as_str().to_lowercase().parse::<ModelKind>().unwrap(), k);
        }
        assert!("ridge".parse::<ModelKind>().is_err());
    }

    #[test]
    fn lr_in_sample_r2_variants_agree() {
        let (x, mut y) = data();
        y.iter_mut().enumerate().for_each(|(i, v)| *v += ((i * 13) % 5) as f64 * 0.3);
        let m = train_lr(&x, &y).unwrap();
        let p = m.predict(&x, false).unwrap();
        let a = r_squared(&p, &y, R2Variant::Explained).unwrap();
        let b = r_squared(&p, &y, R2Variant::Standard).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn gpr_standardized_interpolates() {
        let (x, y) = data();
        let m = train_gpr(&x, &y, None, 0.0).unwrap();
        for (r, t) in x.iter().zip(&y) {
            assert!((m.predict_row(r).unwrap() - t).abs() < 1e-6);
        }
    }

    #[test]
    fn cart_pure_leaves_return_training_targets() {
        let x: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..8).map(|i| if i < 4 { 1.0 } else { 9.0 }).collect();
        let m = train_cart(&x, &y, 3, 2).unwrap();
        assert_eq!(m.predict(&x, false).unwrap(), y);
        assert!(train_cart(&x[..1], &y[..1], 3, 2).is_err());
    }

    #[test]
    fn dimension_mismatch_and_clamp() {
        let (x, y) = data();
        let m = train_lr(&x, &y).unwrap();
        assert!(matches!(m.predict_row(&[1.0]), Err(Error::InvalidArgument(_))));
        let neg = vec![vec![0.0, 6.0, 3.0]];
        assert!(m.predict(&neg, false).unwrap()[0] < 0.0);
        assert_eq!(m.predict(&neg, true).unwrap()[0], 0.0);
    }

    #[test]
    fn round_trip_is_bitwise() {
        let (x, y) = data();
        let dir = tempfile::tempdir().unwrap();
        for k in ModelKind::ALL {
            let m = train(k, &x, &y, &Hyperparams::default(), 9).unwrap();
            let path = dir.path().join(format!("{k}.bin"));
            m.save(&path).unwrap();
            let back = TrainedModel::load(&path).unwrap();
            assert_eq!(back.seed, 9);
            for r in &x {
                assert_eq!(m.predict_row(r).unwrap().to_bits(), back.predict_row(r).unwrap().to_bits());
            }
        }
    }

    #[test]
    fn ragged_rows_rejected() {
        let x = vec![vec![1.0, 2.0], vec![1.0]];
        assert!(train_lr(&x, &[1.0, 2.0]).is_err());
    }
}

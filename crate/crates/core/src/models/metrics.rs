//! Goodness-of-fit and correlation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum R2Variant {
    /// Explained sum of squares over total sum of squares.
    Explained,
    /// `1 - SS_res / SS_tot`.
    Standard,
}

fn check(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!("length mismatch: {} vs {}", a.len(), b.len())));
    }
    if a.len() < 2 {
        return Err(Error::UndefinedMetric(format!("need at least 2 samples, got {}", a.len())));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn r_squared(pred: &[f64], truth: &[f64], variant: R2Variant) -> Result<f64> {
    check(pred, truth)?;
    let m = mean(truth);
    let ss_tot: f64 = truth.iter().map(|t| (t - m) * (t - m)).sum();
    if ss_tot <= 0.0 {
        return Err(Error::UndefinedMetric("truth has zero variance".into()));
    }
    Ok(match variant {
        R2Variant::Explained => pred.iter().map(|p| (p - m) * (p - m)).sum::<f64>() / ss_tot,
        R2Variant::Standard => 1.0 - pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum::<f64>() / ss_tot,
    })
}

/// Pearson correlation coefficient.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    check(a, b)?;
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return Err(Error::UndefinedMetric("zero variance".into()));
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub r2_explained: f64,
    pub r2_standard: f64,
    pub rho: f64,
    pub n: usize,
}

impl Metrics {
    pub fn compute(pred: &[f64], truth: &[f64]) -> Result<Metrics> {
        Ok(Metrics {
            r2_explained: r_squared(pred, truth, R2Variant::Explained)?,
            r2_standard: r_squared(pred, truth, R2Variant::Standard)?,
            rho: pearson(pred, truth)?,
            n: pred.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn r2_cases() {
        let t = [1.0, 2.0, 3.0];
        for v in [R2Variant::Explained, R2Variant::Standard] {
            assert_eq!(r_squared(&t, &t, v).unwrap(), 1.0);
            assert_eq!(r_squared(&[2.0; 3], &t, v).unwrap(), 0.0);
        }
        // Mean 2, SS_tot 2. Paper: (1 + 0 + 4) / 2. Standard: 1 - 1/2.
        assert_eq!(r_squared(&[1.0, 2.0, 4.0], &t, R2Variant::Explained).unwrap(), 2.5);
        assert_eq!(r_squared(&[1.0, 2.0, 4.0], &t, R2Variant::Standard).unwrap(), 0.5);
        assert!(matches!(r_squared(&t, &[1.0; 3], R2Variant::Explained), Err(Error::UndefinedMetric(_))));
        assert!(r_squared(&[1.0], &[1.0], R2Variant::Explained).is_err());
    }

    #[test]
    fn pearson_cases() {
        let a = [1.0, 2.0, 5.0];
        assert!((pearson(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&a, &[-1.0, -2.0, -5.0]).unwrap() + 1.0).abs() < 1e-15);
        assert!(matches!(pearson(&a, &[3.0; 3]), Err(Error::UndefinedMetric(_))));
    }

    proptest! {
        #[test]
        fn pearson_symmetry_and_affine(
            pairs in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3..30),
            scale in 0.1f64..10.0,
            shift in -5.0f64..5.0,
        ) {
            let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            if let Ok(r) = pearson(&a, &b) {
                prop_assert!((-1.0..=1.0).contains(&r));
                prop_assert!((r - pearson(&b, &a).unwrap()).abs() < 1e-12);
                let t: Vec<f64> = a.iter().map(|x| x * scale + shift).collect();
                prop_assert!((r - pearson(&t, &b).unwrap()).abs() < 1e-9);
                let neg: Vec<f64> = a.iter().map(|x| -x).collect();
                prop_assert!((r + pearson(&neg, &b).unwrap()).abs() < 1e-12);
            }
        }
    }
}

mod common;

use common::svr_qp;
use early_citers::models::{Kernel, SvrModel, SvrParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64, n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let x: Vec<Vec<f64>> = (0..n).map(|_| (0..3).map(|_| rng.gen_range(-1.5..1.5)).collect()).collect();
    let z = x
        .iter()
        .map(|r| r.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + 0.5 + rng.gen_range(-0.8..0.8))
        .collect();
    (x, z)
}

fn compare(x: &[Vec<f64>], z: &[f64], params: &SvrParams) {
    let ours = SvrModel::fit(x, z, params).unwrap();
    let qp = svr_qp::solve(x, z, params.c, params.epsilon, params.kernel);
    let rel = (ours.objective - qp.objective).abs() / qp.objective.abs().max(1.0);
    assert!(rel < 1e-6, "objective {} vs {} (rel {rel:e})", ours.objective, qp.objective);
    for r in x {
        let (a, b) = (ours.predict_row(r), qp.predict(r));
        assert!((a - b).abs() < 1e-3, "prediction {a} vs {b}");
    }
}

#[test]
fn linear_instances_match_qp() {
    for seed in 0..20 {
        let (x, z) = instance(seed, 20);
        compare(&x, &z, &SvrParams::default());
    }
}

#[test]
fn rbf_and_wide_tube_match_qp() {
    for seed in 100..105 {
        let (x, z) = instance(seed, 25);
        let params = SvrParams {
            c: 5.0,
            epsilon: 0.3,
            kernel: Kernel::Rbf { length_scale: 1.2 },
            ..Default::default()
        };
        compare(&x, &z, &params);
    }
}

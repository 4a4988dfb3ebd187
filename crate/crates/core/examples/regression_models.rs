//! Train the four regressors on a noisy nonlinear target and compare them
//! on held-out points.

use early_citers::models::{pearson, r_squared, train, Hyperparams, ModelKind, R2Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sample(rng: &mut ChaCha8Rng, n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let x: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(0.0..6.0), rng.gen_range(0.0..3.0)]).collect();
    let y = x.iter().map(|r| 4.0 * r[0].sin() + r[1] * r[1] + rng.gen_range(-0.3..0.3)).collect();
    (x, y)
}

fn main() -> early_citers::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (x, y) = sample(&mut rng, 300);
    let (xt, yt) = sample(&mut rng, 200);
    let hp = Hyperparams::default();

    println!("{:<6}{:>8}{:>8}", "model", "rho", "R2");
    for kind in ModelKind::ALL {
        let model = train(kind, &x, &y, &hp, 1)?;
        let pred = model.predict(&xt, false)?;
        let rho = pearson(&pred, &yt)?;
        let r2 = r_squared(&pred, &yt, R2Variant::Standard)?;
        println!("{:<6}{rho:>8.3}{r2:>8.3}", kind.as_str());
    }
    Ok(())
}

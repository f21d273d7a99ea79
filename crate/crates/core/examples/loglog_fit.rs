//! Log-log slope of a noisy power law.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tangency::experiments::fit_loglog;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let xs: Vec<f64> = (4..=12).map(|k| 2f64.powi(k)).collect();
    let ys: Vec<f64> = xs
        .iter()
        .map(|x| x.powf(4.0 / 3.0) * (1.0 + 0.05 * rng.random_range(-1.0..1.0)))
        .collect();
    let fit = fit_loglog(&xs, &ys).unwrap();
    println!("slope {:.4} intercept {:.4}", fit.slope, fit.intercept);
    println!("residuals {:?}", fit.residuals.iter().map(|r| (r * 1e3).round() / 1e3).collect::<Vec<_>>());
}

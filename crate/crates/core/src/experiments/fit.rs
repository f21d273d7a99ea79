//! Least-squares fits of log-log data.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least {min} points, got {got}")]
    TooFew { min: usize, got: usize },
    #[error("all abscissae are equal")]
    Degenerate,
    #[error("log-log fit needs positive data, got ({x}, {y})")]
    NonPositive { x: f64, y: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    /// Natural-log intercept: `ln y ≈ intercept + slope · ln x`.
    pub intercept: f64,
    pub residuals: Vec<f64>,
}

/// Ordinary least squares of `ln y` against `ln x` over at least three points.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<LogLogFit, FitError> {
    let n = xs.len().min(ys.len());
    if n < 3 {
        return Err(FitError::TooFew { min: 3, got: n });
    }
    let mut lx = Vec::with_capacity(n);
    let mut ly = Vec::with_capacity(n);
    for (&x, &y) in xs.iter().zip(ys) {
        if !(x > 0.0 && y > 0.0) {
            return Err(FitError::NonPositive { x, y });
        }
        lx.push(x.ln());
        ly.push(y.ln());
    }
    let mx = lx.iter().sum::<f64>() / n as f64;
    let my = ly.iter().sum::<f64>() / n as f64;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 1e-24 * (1.0 + mx * mx) {
        return Err(FitError::Degenerate);
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = lx.iter().zip(&ly).map(|(x, y)| y - intercept - slope * x).collect();
    Ok(LogLogFit {
        slope,
        intercept,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn power_law_slope() {
        let xs: Vec<f64> = (1..=8).map(|k| 2f64.powi(k)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.powf(4.0 / 3.0)).collect();
        let fit = fit_loglog(&xs, &ys).unwrap();
        assert!((fit.slope - 4.0 / 3.0).abs() < 1e-9);
        let flat = fit_loglog(&xs, &vec![3.0; xs.len()]).unwrap();
        assert!(flat.slope.abs() < 1e-12);
    }

    #[test]
    fn noisy_power_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let xs: Vec<f64> = (1..=12).map(|k| 2f64.powi(k)).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| x.powf(4.0 / 3.0) * (1.0 + 0.01 * rng.random_range(-1.0..1.0)))
            .collect();
        assert!((fit_loglog(&xs, &ys).unwrap().slope - 4.0 / 3.0).abs() < 0.05);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(fit_loglog(&[2.0; 4], &[1.0, 2.0, 3.0, 4.0]), Err(FitError::Degenerate));
        assert_eq!(fit_loglog(&[1.0, 2.0], &[1.0, 2.0]), Err(FitError::TooFew { min: 3, got: 2 }));
        assert!(fit_loglog(&[1.0, 2.0, 3.0], &[1.0, 0.0, 3.0]).is_err());
    }
}

//! Binomial tail bounds: exact summation and Monte Carlo.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChernoffError {
    #[error("invalid parameter {param}: {reason}")]
    InvalidParams { param: &'static str, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChernoffResult {
    pub n: u64,
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    /// `ln P(S_n > 10np)` by exact summation.
    pub exact_upper_ln: f64,
    /// `ln P(S_n < np/10)` by exact summation.
    pub exact_lower_ln: f64,
    /// `-5np`
    pub bound_upper_ln: f64,
    /// `-np/2`
    pub bound_lower_ln: f64,
    pub mc_upper: f64,
    pub mc_lower: f64,
}

impl ChernoffResult {
    pub fn exact_ok(&self) -> bool {
        self.exact_upper_ln <= self.bound_upper_ln && self.exact_lower_ln <= self.bound_lower_ln
    }

    pub fn monte_carlo_ok(&self) -> bool {
        self.mc_upper <= self.bound_upper_ln.exp() && self.mc_lower <= self.bound_lower_ln.exp()
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln P(lo <= S_n <= hi)` for `S_n ~ Binomial(n, p)`, summed in log space.
pub fn binomial_range_ln(n: u64, p: f64, lo: u64, hi: u64) -> f64 {
    if lo > hi || lo > n {
        return f64::NEG_INFINITY;
    }
    let hi = hi.min(n);
    let odds = (p / (1.0 - p)).ln();
    let mut ln_pmf = n as f64 * (-p).ln_1p();
    let mut acc = f64::NEG_INFINITY;
    for k in 0..=hi {
        if k >= lo {
            acc = log_add(acc, ln_pmf);
        }
        if k < n {
            ln_pmf += ((n - k) as f64 / (k + 1) as f64).ln() + odds;
        }
    }
    acc
}

/// Tail events `{S_n > 10np}` and `{S_n < np/10}` against `e^{-5np}` and `e^{-np/2}`.
pub fn chernoff_tails(n: u64, p: f64, trials: u64, seed: u64) -> Result<ChernoffResult, ChernoffError> {
    if n == 0 {
        return Err(ChernoffError::InvalidParams {
            param: "n",
            reason: "must be at least 1".into(),
        });
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(ChernoffError::InvalidParams {
            param: "p",
            reason: "must lie in (0, 1)".into(),
        });
    }
    if trials == 0 {
        return Err(ChernoffError::InvalidParams {
            param: "trials",
            reason: "must be at least 1".into(),
        });
    }
    let np = n as f64 * p;
    let upper_from = (10.0 * np).floor() as u64 + 1;
    let lower_to = (np / 10.0).ceil() as i64 - 1;
    let exact_upper_ln = binomial_range_ln(n, p, upper_from, n);
    let exact_lower_ln = if lower_to < 0 {
        f64::NEG_INFINITY
    } else {
        binomial_range_ln(n, p, 0, lower_to as u64)
    };

    let dist = Binomial::new(n, p).map_err(|e| ChernoffError::InvalidParams {
        param: "p",
        reason: e.to_string(),
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut up, mut low) = (0u64, 0u64);
    for _ in 0..trials {
        let s = dist.sample(&mut rng) as f64;
        if s > 10.0 * np {
            up += 1;
        }
        if s < np / 10.0 {
            low += 1;
        }
    }
    Ok(ChernoffResult {
        n,
        p,
        trials,
        seed,
        exact_upper_ln,
        exact_lower_ln,
        bound_upper_ln: -5.0 * np,
        bound_lower_ln: -np / 2.0,
        mc_upper: up as f64 / trials as f64,
        mc_lower: low as f64 / trials as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_sums_to_one() {
        for (n, p) in [(10, 0.3), (100, 0.05), (1000, 0.5)] {
            assert!(binomial_range_ln(n, p, 0, n).abs() < 1e-10);
        }
        assert!((binomial_range_ln(10, 0.5, 0, 0) - 10.0 * 0.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn small_case() {
        let r = chernoff_tails(100, 0.05, 100_000, 1).unwrap();
        assert!(r.exact_upper_ln <= -25.0);
        assert_eq!(r.mc_upper, 0.0);
        assert!(r.exact_ok() && r.monte_carlo_ok());
    }

    #[test]
    fn zero_event_bound() {
        // P(S = 0) = (1 − p)^n <= e^{−np/2} for p <= 1/2.
        for p in [0.001, 0.01, 0.1, 0.5] {
            for n in [1u64, 10, 1000] {
                let ln0 = binomial_range_ln(n, p, 0, 0);
                assert!(ln0 <= -(n as f64) * p / 2.0);
            }
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(chernoff_tails(0, 0.5, 1, 0).is_err());
        assert!(chernoff_tails(10, 1.0, 1, 0).is_err());
        assert!(chernoff_tails(10, 0.5, 0, 0).is_err());
    }
}

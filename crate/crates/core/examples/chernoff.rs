//! Binomial tails against the exponential bounds, exactly and by sampling.

use tangency::experiments::chernoff_tails;

fn main() {
    for (n, p) in [(100, 0.05), (1000, 0.01), (10_000, 0.1)] {
        let r = chernoff_tails(n, p, 200_000, 1).unwrap();
        println!(
            "n={n} p={p}: ln P(S>10np) = {:.2} <= {:.2}, ln P(S<np/10) = {:.2} <= {:.2}, sampled {} / {}",
            r.exact_upper_ln, r.bound_upper_ln, r.exact_lower_ln, r.bound_lower_ln, r.mc_upper, r.mc_lower
        );
    }
}

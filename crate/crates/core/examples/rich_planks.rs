//! Richness of incomparable planks over a separated grid, bucketed by dyadic μ.

use tangency::families::{gen_maximal_separated, GridBox};
use tangency::planks::{enumerate_incomparable, mu_histogram, verify_incomparable};

fn main() {
    let r = 256.0;
    let x = gen_maximal_separated(r, r.sqrt(), GridBox::Cube).unwrap();
    let c = enumerate_incomparable(r, r, 2.0, x.bbox()).unwrap();
    println!("R={r}: |P|={} maximal {}", c.len(), c.is_maximal());

    let hist = mu_histogram(&c, &x, 1.0);
    let n43 = (x.len() as f64).powf(4.0 / 3.0);
    for (mu, count) in hist.bucket_sizes() {
        let ratio = (mu as f64).powf(4.0 / 3.0) * count as f64 / n43;
        println!("  mu={mu:>3}: {count:>7} planks, mu^(4/3)|P_mu|/|X|^(4/3) = {ratio:.4}");
    }

    let small = enumerate_incomparable(32.0, 32.0, 2.0, tangency::geometry::Aabb3::cube(0.0, 32.0)).unwrap();
    let stats = verify_incomparable(&small).unwrap();
    println!("R=32: {} planks pairwise incomparable, {} candidate pairs tested", stats.planks, stats.tested_pairs);
}

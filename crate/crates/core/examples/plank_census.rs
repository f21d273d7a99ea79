//! Size of the incomparable plank lattice and the cost of richness counting.

use std::time::Instant;

use tangency::families::{gen_maximal_separated, GridBox};
use tangency::geometry::Aabb3;
use tangency::planks::{enumerate_incomparable, mu_histogram};

fn main() {
    for exp in 6u32..=10 {
        let r = f64::from(1u32 << exp);
        let c = enumerate_incomparable(r, r, 2.0, Aabb3::cube(0.0, r)).unwrap();
        let l = c.lattice().unwrap();
        let t = Instant::now();
        let size = c.len() as f64;
        let count_ms = t.elapsed().as_millis();
        let x = gen_maximal_separated(r, r.sqrt(), GridBox::Cube).unwrap();
        let t = Instant::now();
        let hist = mu_histogram(&c, &x, 1.0);
        println!(
            "R={r} rows={} spacing={:?} |P|={size} |P|/R^2={:.2} count_ms={count_ms} |X|={} rich={} max={:?} hist_ms={}",
            l.rows.len(),
            l.spacing,
            size / (r * r),
            x.len(),
            hist.rich_planks(),
            hist.max(),
            t.elapsed().as_millis()
        );
    }
}

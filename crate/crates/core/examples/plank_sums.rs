//! Tangent pairs at each distance scale against the plank sum of their lifts.

use tangency::experiments::run_plank_sum_check;
use tangency::families::gen_uniform;

fn main() {
    let x = gen_uniform(1000, 3).unwrap();
    for a in [2.0, 4.0] {
        println!("A={a}");
        for c in run_plank_sum_check(&x, 0.01, a, 2.0).unwrap() {
            println!(
                "  D=2^{}: {} pairs, {} planks, sum |X∩AP|^2 = {}, ratio {:.4}, witness {}",
                c.d,
                c.pairs,
                c.planks,
                c.rhs,
                c.ratio(),
                c.witness_ok
            );
        }
    }
}

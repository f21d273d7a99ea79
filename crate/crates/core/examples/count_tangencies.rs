//! Near-tangent and exactly tangent pairs, with the brute-force oracles.

use std::time::Instant;

use tangency::families::{gen_integer_lattice, gen_uniform};
use tangency::incidence::{bin_dyadic, count_ct0_exact, count_ct_delta_bruteforce, count_ct_delta_hashed};

fn main() {
    let x = gen_uniform(2000, 7).unwrap();
    for delta in [1e-1, 1e-2, 1e-3] {
        let t = Instant::now();
        let fast = count_ct_delta_hashed(&x, delta).unwrap();
        let fast_ms = t.elapsed().as_millis();
        let t = Instant::now();
        let slow = count_ct_delta_bruteforce(&x, delta).unwrap();
        println!(
            "delta={delta}: {} pairs hashed in {fast_ms} ms, brute force agrees: {} ({} ms)",
            fast.len(),
            fast.pairs == slow.pairs,
            t.elapsed().as_millis()
        );
    }

    let binned = bin_dyadic(&count_ct_delta_hashed(&x, 1e-2).unwrap(), &x).unwrap();
    for (k, pairs) in binned.by_distance.as_ref().unwrap() {
        println!("  distance in [2^{k}, 2^{}): {}", k + 1, pairs.len());
    }

    for n in [4, 8, 16] {
        let lattice = gen_integer_lattice(n).unwrap();
        let ct = count_ct0_exact(&lattice).unwrap();
        println!("lattice n={n}: |X|={} exact tangencies {} (ordered {})", lattice.len(), ct.len(), ct.ordered_len());
    }
}

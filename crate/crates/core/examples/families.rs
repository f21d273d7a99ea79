//! Generators and the diagnostics that check their hypotheses.

use tangency::families::{
    check_frostman, check_separation, cube_occupancy, gen_clamshell, gen_maximal_separated, gen_random_wellspaced,
    GridBox,
};

fn main() {
    let grid = gen_maximal_separated(256.0, 16.0, GridBox::Cube).unwrap();
    let sep = check_separation(&grid, 16.0).unwrap();
    println!("grid R=256 rho=16: |X|={} min gap {} separated {}", grid.len(), sep.min_gap, sep.separated);

    for seed in 0..3 {
        let x = gen_random_wellspaced(4096.0, 64.0, 0.1, seed).unwrap();
        let occ = cube_occupancy(&x, 64.0).unwrap();
        println!(
            "wellspaced R=4096 rho=64 eps=0.1 seed={seed}: |X|={} max per rho-cube {} (limit {:.1})",
            x.len(),
            occ.max_count,
            10.0 * 4096f64.powf(0.1)
        );
    }

    // A clamshell is concentrated: all its points lie on one light ray.
    for (name, x) in [("clamshell", gen_clamshell(64).unwrap()), ("grid", grid.scaled(1.0 / 256.0))] {
        let f = check_frostman(&x, 1.0 / 64.0).unwrap();
        println!(
            "{name}: Frostman constant {:.2}, concentrated {}",
            f.frostman_constant(),
            f.concentrated()
        );
    }
}

//! Rectangles rich in two separated families.

use tangency::families::gen_clamshell_from;
use tangency::planks::rectangles::bilinear_rich;

fn main() {
    let b = gen_clamshell_from(&[0.1, 0.2, 0.3, 0.4]).unwrap();
    let w = gen_clamshell_from(&[0.6, 0.7, 0.8, 0.9]).unwrap();
    for (mu, nu) in [(1.0, 1.0), (4.0, 4.0), (5.0, 1.0)] {
        let res = bilinear_rich(&b, &w, 1e-3, mu, nu, 2.0).unwrap();
        println!(
            "mu={mu} nu={nu}: {} rich of {} rectangles, bound {:.2}, warnings {:?}",
            res.count, res.candidates, res.rhs, res.warnings
        );
    }
}

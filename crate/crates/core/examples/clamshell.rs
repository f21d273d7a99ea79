//! The degenerate clamshell: every pair is tangent and one rectangle sees all circles.

use tangency::families::{gen_clamshell, gen_clamshell_integer};
use tangency::incidence::{count_ct0_exact, count_ct0_tolerance, max_points_on_light_ray};
use tangency::planks::rectangles::rich_rectangles;

fn main() {
    let x = gen_clamshell(100).unwrap();
    println!("clamshell N=100: {} tangent pairs", count_ct0_tolerance(&x, None).unwrap().len());
    for (rect, richness) in rich_rectangles(&x, 1e-3, 2.0).unwrap() {
        println!(
            "rectangle at ({:.3}, {:.3}), {} x {}: richness {richness}",
            rect.rect.center[0], rect.rect.center[1], rect.rect.width, rect.rect.length
        );
    }

    let xi = gen_clamshell_integer(30).unwrap();
    let ct = count_ct0_exact(&xi).unwrap();
    println!(
        "integer clamshell N=30: {} tangencies, {} points on one light ray",
        ct.len(),
        max_points_on_light_ray(&xi, &ct).unwrap()
    );
}

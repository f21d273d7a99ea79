//! Tangency rectangles, their lifts to lightplanks, and greedy extraction of
//! incomparable subfamilies.

use std::collections::HashMap;

use crate::families::CircleFamily;
use crate::geometry::{
    norm3, plank_comparable, tangency_point, tangency_rect, Circle3, GeometryError, Lightplank, Rect2,
    TangencyPoint, Vec3,
};
use crate::incidence::{lift_rect, near_tangent_pairs, IncidenceError};

/// The `a × √(ab) × b` plank along the light ray of circles tangent at `tp`,
/// centered at height `mid_radius`.
///
/// Circles internally tangent at `z` with normal `u` are the points
/// `(z − r·u, r)`, a ray in the direction of the frame's `c`-axis at the
/// normal angle.
pub fn rect_plank(tp: &TangencyPoint, mid_radius: f64, a_len: f64, b_len: f64) -> Lightplank {
    let center = [
        tp.point[0] - mid_radius * tp.normal[0],
        tp.point[1] - mid_radius * tp.normal[1],
        mid_radius,
    ];
    Lightplank::new(tp.normal_angle(), center, a_len, b_len)
}

/// The `δ × √(Dδ) × D` plank of a near-tangent pair at distance scale `D`,
/// centered at the midpoint and aligned with the pair's tangency normal.
pub fn pair_plank(x: &Circle3, y: &Circle3, delta: f64, d: f64) -> Result<Lightplank, GeometryError> {
    let tp = tangency_point(x, y)?;
    let (p, q) = (x.point(), y.point());
    let mid: Vec3 = [0, 1, 2].map(|i| 0.5 * (p[i] + q[i]));
    Ok(Lightplank::new(tp.normal_angle(), mid, delta, d))
}

/// Result of a greedy incomparable extraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    /// Indices of the selected planks, in input order.
    pub kept: Vec<usize>,
    /// For each input plank, a selected plank equal or comparable to it.
    pub witness: Vec<usize>,
}

/// Scans `planks` in order, keeping each one that is `k`-incomparable with
/// everything kept so far. All planks must share their dimensions.
pub fn greedy_incomparable(planks: &[Lightplank], k: f64) -> Extraction {
    let Some(first) = planks.first() else {
        return Extraction {
            kept: Vec::new(),
            witness: Vec::new(),
        };
    };
    // Comparable planks have one center inside the other's k-dilation.
    let cell = (k * norm3(&first.half_widths())).max(f64::MIN_POSITIVE);
    let key = |p: &Vec3| p.map(|v| (v / cell).floor() as i64);
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    let mut kept = Vec::new();
    let mut witness = Vec::with_capacity(planks.len());
    for (i, p) in planks.iter().enumerate() {
        let c = key(&p.center);
        let mut found = None;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(list) = grid.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) {
                        if let Some(&j) = list.iter().find(|&&j| plank_comparable(p, &planks[j], k)) {
                            found = Some(j);
                            break 'search;
                        }
                    }
                }
            }
        }
        match found {
            Some(j) => witness.push(j),
            None => {
                grid.entry(c).or_default().push(i);
                kept.push(i);
                witness.push(i);
            }
        }
    }
    Extraction { kept, witness }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RichRectangle {
    pub rect: Rect2,
    pub point: TangencyPoint,
    pub plank: Lightplank,
    /// The near-tangent pair that produced it.
    pub pair: (u32, u32),
}

fn lift_params(circles: &[Circle3], fallback_scale: f64) -> (f64, f64) {
    let lo = circles.iter().map(|c| c.radius).fold(f64::INFINITY, f64::min);
    let hi = circles.iter().map(|c| c.radius).fold(f64::NEG_INFINITY, f64::max);
    let height = if hi > lo { hi - lo } else { fallback_scale };
    (0.5 * (lo + hi), height)
}

/// Rectangles of cross or internal near-tangent pairs, deduplicated by
/// `k`-incomparability of their lifts to `δ × √δ·B × B` planks, where `B` is
/// the radius span and the lift is centered at the middle radius.
fn dedupe_rectangles(
    circles: &[Circle3],
    pairs: &[(u32, u32)],
    delta: f64,
    k: f64,
    scale: f64,
) -> Vec<RichRectangle> {
    let (mid, height) = lift_params(circles, scale);
    let mut rects = Vec::with_capacity(pairs.len());
    for &(i, j) in pairs {
        let (x, y) = (&circles[i as usize], &circles[j as usize]);
        let (Ok(rect), Ok(point)) = (tangency_rect(x, y, delta), tangency_point(x, y)) else {
            continue;
        };
        rects.push(RichRectangle {
            rect,
            point,
            plank: rect_plank(&point, mid, delta, height),
            pair: (i, j),
        });
    }
    let planks: Vec<Lightplank> = rects.iter().map(|r| r.plank).collect();
    let ex = greedy_incomparable(&planks, k);
    ex.kept.into_iter().map(|i| rects[i].clone()).collect()
}

/// Distinct tangency rectangles of a family, with their richness `|D_{10δ}(Ω)|`.
pub fn rich_rectangles(
    x: &CircleFamily,
    delta: f64,
    k: f64,
) -> Result<Vec<(RichRectangle, usize)>, IncidenceError> {
    if !(delta > 0.0) {
        return Err(IncidenceError::InvalidDelta(delta));
    }
    let mut pairs = near_tangent_pairs(x.points(), delta);
    pairs.sort_unstable();
    let rects = dedupe_rectangles(x.points(), &pairs, delta, k, x.scale());
    Ok(rects
        .into_iter()
        .map(|r| {
            let n = lift_rect(&r.rect, x, delta).len();
            (r, n)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BilinearResult {
    /// Rectangles tangent to at least `μ` circles of `B` and `ν` of `W`.
    pub count: usize,
    /// Distinct rectangles examined.
    pub candidates: usize,
    /// `(|B||W|/μν)^{3/4} + |B|/μ + |W|/ν`.
    pub rhs: f64,
    pub ratio: f64,
    pub warnings: Vec<String>,
}

/// Counts `(μ, ν)`-rich rectangles spanned by cross near-tangent pairs.
pub fn bilinear_rich(
    b: &CircleFamily,
    w: &CircleFamily,
    delta: f64,
    mu: f64,
    nu: f64,
    k: f64,
) -> Result<BilinearResult, IncidenceError> {
    if !(delta > 0.0) {
        return Err(IncidenceError::InvalidDelta(delta));
    }
    let (nb, nw) = (b.len() as f64, w.len() as f64);
    let rhs = (nb * nw / (mu * nu)).powf(0.75) + nb / mu + nw / nu;
    let mut warnings = Vec::new();
    if b.is_empty() || w.is_empty() {
        warnings.push("empty family".to_string());
        return Ok(BilinearResult {
            count: 0,
            candidates: 0,
            rhs,
            ratio: 0.0,
            warnings,
        });
    }
    let scale = b.scale().max(w.scale());
    let sep = b
        .points()
        .iter()
        .flat_map(|p| w.points().iter().map(move |q| p.distance(q)))
        .fold(f64::INFINITY, f64::min);
    if !(sep >= scale / 10.0 && sep <= 10.0 * scale) {
        warnings.push(format!("separation d(B, W) = {sep} is not comparable to R = {scale}"));
    }

    let mut circles = b.points().to_vec();
    circles.extend_from_slice(w.points());
    let split = b.len() as u32;
    let mut pairs: Vec<(u32, u32)> = near_tangent_pairs(&circles, delta)
        .into_iter()
        .filter(|&(i, j)| (i < split) != (j < split))
        .collect();
    pairs.sort_unstable();
    let rects = dedupe_rectangles(&circles, &pairs, delta, k, scale);
    let count = rects
        .iter()
        .filter(|r| {
            lift_rect(&r.rect, b, delta).len() as f64 >= mu && lift_rect(&r.rect, w, delta).len() as f64 >= nu
        })
        .count();
    Ok(BilinearResult {
        count,
        candidates: rects.len(),
        rhs,
        ratio: count as f64 / rhs,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{gen_clamshell, gen_clamshell_from, Provenance};
    use crate::geometry::{plank_contains, Aabb3};
    use crate::incidence::count_ct_delta_bruteforce;

    #[test]
    fn clamshell_has_one_full_rectangle() {
        let f = gen_clamshell(100).unwrap();
        let rects = rich_rectangles(&f, 1e-3, 2.0).unwrap();
        assert_eq!(rects.len(), 1);
        assert_eq!(rects[0].1, 100);
    }

    #[test]
    fn pair_plank_holds_its_pair() {
        let x = Circle3::new(0.0, 0.0, 1.0);
        let y = Circle3::new(0.5, 0.0, 1.5 + 0.004);
        let d = x.distance(&y);
        let p = pair_plank(&x, &y, 0.01, 2f64.powi(crate::incidence::dyadic_exponent(d))).unwrap();
        assert!(plank_contains(&p, &x, 2.0) && plank_contains(&p, &y, 2.0));
    }

    #[test]
    fn tangent_rays_lie_in_rect_plank() {
        let f = gen_clamshell_from(&[0.25, 0.5, 0.75]).unwrap();
        let p = f.points();
        let tp = tangency_point(&p[0], &p[2]).unwrap();
        let plank = rect_plank(&tp, 1.5, 0.01, 1.0);
        for c in p {
            let off = plank.frame.coords(&crate::geometry::sub3(&c.point(), &plank.center));
            assert!(off[0].abs() < 1e-12 && off[1].abs() < 1e-12);
        }
    }

    #[test]
    fn greedy_extraction_witnesses() {
        let planks: Vec<Lightplank> = (0..20)
            .map(|i| Lightplank::new(0.0, [i as f64 * 0.2, 0.0, 0.0], 1.0, 4.0))
            .collect();
        let ex = greedy_incomparable(&planks, 2.0);
        for (i, &w) in ex.witness.iter().enumerate() {
            assert!(ex.kept.contains(&w));
            assert!(i == w || plank_comparable(&planks[i], &planks[w], 2.0));
        }
        for (a, &i) in ex.kept.iter().enumerate() {
            for &j in &ex.kept[a + 1..] {
                assert!(!plank_comparable(&planks[i], &planks[j], 2.0));
            }
        }
    }

    #[test]
    fn bilinear_examples() {
        let b = gen_clamshell_from(&[0.125, 0.25, 0.375, 0.5]).unwrap();
        let w = gen_clamshell_from(&[0.625, 0.75, 0.875, 1.0]).unwrap();
        let res = bilinear_rich(&b, &w, 1e-3, 4.0, 4.0, 2.0).unwrap();
        assert_eq!(res.count, 1);
        assert_eq!(res.candidates, 1);

        let empty = CircleFamily::new(vec![], 1.0, 1.0, Aabb3::annular(1.0), Provenance::new("e")).unwrap();
        assert_eq!(bilinear_rich(&empty, &w, 1e-3, 1.0, 1.0, 2.0).unwrap().count, 0);

        // With μ = ν = 1 every rectangle needs a witness cross pair.
        let res = bilinear_rich(&b, &w, 1e-3, 1.0, 1.0, 2.0).unwrap();
        let mut all = b.points().to_vec();
        all.extend_from_slice(w.points());
        let union = CircleFamily::new(all, 1.0, 0.1, Aabb3::annular(1.0), Provenance::new("u")).unwrap();
        let cross = count_ct_delta_bruteforce(&union, 1e-3)
            .unwrap()
            .pairs
            .iter()
            .filter(|&&(i, j)| (i < 4) != (j < 4))
            .count();
        assert!(res.count <= cross);
    }
}

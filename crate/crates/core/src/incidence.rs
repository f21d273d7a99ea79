//! Counting near-tangent and exactly tangent pairs.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use thiserror::Error;

use crate::families::{CircleFamily, FamilyError};
use crate::geometry::{
    annulus_contains_rect, delta_gap, is_exact_tangent_int, Circle3, GeometryError, IntCircle3,
    Rect2, Vec3,
};
use crate::spatial::UniformGrid;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IncidenceError {
    #[error("delta must be positive, got {0}")]
    InvalidDelta(f64),
    #[error("points {0} and {1} coincide")]
    Coincident(u32, u32),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("pair ({0}, {1}) does not index the family")]
    BadIndex(u32, u32),
}

/// Unordered pairs `(i, j)`, `i < j`, of a family, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TangencyPairSet {
    pub pairs: Vec<(u32, u32)>,
    /// Threshold used; 0 for exact tangency.
    pub delta: f64,
    /// Pairs keyed by the exponent `k` of their dyadic distance scale `2^k`.
    pub by_distance: Option<BTreeMap<i32, Vec<(u32, u32)>>>,
}

impl TangencyPairSet {
    fn from_unsorted(mut pairs: Vec<(u32, u32)>, delta: f64) -> Self {
        pairs.sort_unstable();
        Self {
            pairs,
            delta,
            by_distance: None,
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Count in the ordered-pair convention of `X²`.
    pub fn ordered_len(&self) -> usize {
        2 * self.pairs.len()
    }

    /// Pairs with distance in `[2^k, 2^{k+1})`, if binned.
    pub fn bucket(&self, k: i32) -> &[(u32, u32)] {
        self.by_distance
            .as_ref()
            .and_then(|b| b.get(&k))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}

fn check_delta(delta: f64) -> Result<(), IncidenceError> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(IncidenceError::InvalidDelta(delta))
    }
}

/// Reference `O(|X|²)` scan for `Δ < δ`.
pub fn count_ct_delta_bruteforce(
    x: &CircleFamily,
    delta: f64,
) -> Result<TangencyPairSet, IncidenceError> {
    check_delta(delta)?;
    let pts = x.points();
    let pairs: Vec<(u32, u32)> = (0..pts.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..pts.len())
                .filter(move |&j| delta_gap(&pts[i], &pts[j]) < delta)
                .map(move |j| (i as u32, j as u32))
        })
        .collect();
    Ok(TangencyPairSet::from_unsorted(pairs, delta))
}

/// Grid-accelerated `Δ < δ` search.
///
/// For a point `x` and a horizontal layer of cells, the height differences
/// `|x3 − y3|` lie in some `[t_min, t_max]`, so a partner must have planar
/// distance in `(t_min − δ, t_max + δ)`. Only the planar cells meeting that
/// annulus are scanned, and every candidate is re-tested with [`delta_gap`].
pub fn count_ct_delta_hashed(
    x: &CircleFamily,
    delta: f64,
) -> Result<TangencyPairSet, IncidenceError> {
    check_delta(delta)?;
    Ok(TangencyPairSet::from_unsorted(near_tangent_pairs(x.points(), delta), delta))
}

/// Unsorted pairs `i < j` of `circles` with `Δ < δ`, found as in
/// [`count_ct_delta_hashed`]. `circles` need not form a valid family.
pub fn near_tangent_pairs(circles: &[Circle3], delta: f64) -> Vec<(u32, u32)> {
    let pts: Vec<Vec3> = circles.iter().map(Circle3::point).collect();
    if pts.len() < 2 {
        return Vec::new();
    }
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in &pts {
        for i in 0..3 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let spans: Vec3 = [0, 1, 2].map(|i| hi[i] - lo[i]);
    let volume: f64 = spans.iter().map(|s| s.max(delta)).product();
    let h = delta.max((volume / pts.len() as f64).cbrt());
    let grid = UniformGrid::build(&pts, [h; 3], 1 << 9);
    let slack = 1e-9 * (spans.iter().fold(0.0_f64, |m, &s| m.max(s)) + 1.0);
    let dims = grid.dims();

    (0..pts.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let p = pts[i];
            let mut found = Vec::new();
            for kz in 0..dims[2] {
                let (zlo, zhi) = grid.axis_bounds(2, kz);
                let (zlo, zhi) = (zlo - slack, zhi + slack);
                let tmin = if p[2] < zlo {
                    zlo - p[2]
                } else if p[2] > zhi {
                    p[2] - zhi
                } else {
                    0.0
                };
                let tmax = (p[2] - zlo).abs().max((zhi - p[2]).abs());
                let inner = (tmin - delta).max(0.0);
                let outer = tmax + delta + slack;
                let y0 = grid.axis_index(1, p[1] - outer);
                let y1 = grid.axis_index(1, p[1] + outer);
                for ky in y0..=y1 {
                    let (ylo, yhi) = grid.axis_bounds(1, ky);
                    let (ylo, yhi) = (ylo - slack, yhi + slack);
                    let dy_min = if p[1] < ylo {
                        ylo - p[1]
                    } else if p[1] > yhi {
                        p[1] - yhi
                    } else {
                        0.0
                    };
                    if dy_min > outer {
                        continue;
                    }
                    let chord = (outer * outer - dy_min * dy_min).sqrt();
                    let dy_max = (p[1] - ylo).abs().max((yhi - p[1]).abs());
                    let x0 = grid.axis_index(0, p[0] - chord);
                    let x1 = grid.axis_index(0, p[0] + chord);
                    for kx in x0..=x1 {
                        let (xlo, xhi) = grid.axis_bounds(0, kx);
                        let (xlo, xhi) = (xlo - slack, xhi + slack);
                        let dx_max = (p[0] - xlo).abs().max((xhi - p[0]).abs());
                        if dx_max.hypot(dy_max) < inner {
                            continue;
                        }
                        for &j in grid.cell_items([kx, ky, kz]) {
                            if (j as usize) > i && delta_gap(&circles[i], &circles[j as usize]) < delta {
                                found.push((i as u32, j));
                            }
                        }
                    }
                }
            }
            found.into_iter()
        })
        .collect()
}

/// Exact tangencies of an integer family with dyadic distance buckets.
///
/// Small coordinates use a lookup over the Pythagorean vectors of each radius
/// difference; otherwise the pairwise integer test runs with overflow checks.
pub fn count_ct0_exact(x: &CircleFamily) -> Result<TangencyPairSet, IncidenceError> {
    let pts = x.int_points()?;
    let pairs = if lookup_applicable(&pts) {
        ct0_lookup(&pts)
    } else {
        ct0_bruteforce_int(&pts)?
    };
    let mut set = TangencyPairSet::from_unsorted(pairs, 0.0);
    set.by_distance = Some(bin_int(&set.pairs, &pts)?);
    Ok(set)
}

/// `O(|X|²)` integer oracle.
pub fn count_ct0_bruteforce(x: &CircleFamily) -> Result<TangencyPairSet, IncidenceError> {
    let pts = x.int_points()?;
    let mut set = TangencyPairSet::from_unsorted(ct0_bruteforce_int(&pts)?, 0.0);
    set.by_distance = Some(bin_int(&set.pairs, &pts)?);
    Ok(set)
}

/// Tangency up to the float tolerance `Δ < tol` (default `1e-9·R`), for
/// families without integer coordinates.
pub fn count_ct0_tolerance(
    x: &CircleFamily,
    tol: Option<f64>,
) -> Result<TangencyPairSet, IncidenceError> {
    let tol = tol.unwrap_or(1e-9 * x.scale());
    let mut set = count_ct_delta_hashed(x, tol)?;
    set.delta = 0.0;
    bin_dyadic(&set, x)
}

const LOOKUP_COORD_LIMIT: i64 = 1 << 30;
const LOOKUP_SPREAD_LIMIT: i64 = 4096;

fn lookup_applicable(pts: &[IntCircle3]) -> bool {
    if pts.is_empty() {
        return true;
    }
    let small = pts.iter().all(|p| {
        p.center[0].abs() <= LOOKUP_COORD_LIMIT
            && p.center[1].abs() <= LOOKUP_COORD_LIMIT
            && p.radius.abs() <= LOOKUP_COORD_LIMIT
    });
    let rmin = pts.iter().map(|p| p.radius).min().unwrap_or(0);
    let rmax = pts.iter().map(|p| p.radius).max().unwrap_or(0);
    small && rmax - rmin <= LOOKUP_SPREAD_LIMIT
}

/// All integer `(a, b)` with `a² + b² = k²`.
fn pythagorean_vectors(k: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let kk = k * k;
    for a in 0..=k {
        let rest = kk - a * a;
        let b = (rest as f64).sqrt().round() as i64;
        for b in [b - 1, b, b + 1] {
            if b >= 0 && b * b == rest {
                for (sa, sb) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                    let v = (sa * a, sb * b);
                    if !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
        }
    }
    out
}

fn ct0_lookup(pts: &[IntCircle3]) -> Vec<(u32, u32)> {
    let index: HashMap<IntCircle3, u32> = pts
        .iter()
        .enumerate()
        .map(|(i, p)| (*p, i as u32))
        .collect();
    let rmin = pts.iter().map(|p| p.radius).min().unwrap_or(0);
    let rmax = pts.iter().map(|p| p.radius).max().unwrap_or(0);
    let vectors: Vec<Vec<(i64, i64)>> = (0..=rmax - rmin).map(pythagorean_vectors).collect();
    (0..pts.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let p = pts[i];
            let index = &index;
            let vectors = &vectors;
            (1..=rmax - p.radius).flat_map(move |k| {
                vectors[k as usize].iter().filter_map(move |&(a, b)| {
                    let q = IntCircle3::new(p.center[0] + a, p.center[1] + b, p.radius + k);
                    index.get(&q).map(|&j| {
                        let i = i as u32;
                        (i.min(j), i.max(j))
                    })
                })
            })
        })
        .collect()
}

fn ct0_bruteforce_int(pts: &[IntCircle3]) -> Result<Vec<(u32, u32)>, IncidenceError> {
    let rows: Result<Vec<Vec<(u32, u32)>>, GeometryError> = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::new();
            for j in i + 1..pts.len() {
                if is_exact_tangent_int(&pts[i], &pts[j])? {
                    row.push((i as u32, j as u32));
                }
            }
            Ok(row)
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

/// Exponent `k` with `4^k <= m < 4^{k+1}`, the dyadic scale of distance `√m`.
pub fn dyadic_exponent_sq(m: u128) -> i32 {
    debug_assert!(m > 0);
    (127 - m.leading_zeros() as i32) / 2
}

/// Exponent `k` with `2^k <= d < 2^{k+1}`.
pub fn dyadic_exponent(d: f64) -> i32 {
    debug_assert!(d > 0.0 && d.is_finite());
    let mut k = d.log2().floor() as i32;
    if 2f64.powi(k) > d {
        k -= 1;
    } else if 2f64.powi(k + 1) <= d {
        k += 1;
    }
    k
}

fn bin_int(
    pairs: &[(u32, u32)],
    pts: &[IntCircle3],
) -> Result<BTreeMap<i32, Vec<(u32, u32)>>, IncidenceError> {
    let mut out: BTreeMap<i32, Vec<(u32, u32)>> = BTreeMap::new();
    for &(i, j) in pairs {
        let (a, b) = (&pts[i as usize], &pts[j as usize]);
        let sq = |u: i64, v: i64| -> Result<u128, IncidenceError> {
            let d = u.checked_sub(v).ok_or(GeometryError::Overflow)?;
            Ok(u128::from(d.unsigned_abs()).pow(2))
        };
        let m = sq(a.center[0], b.center[0])? + sq(a.center[1], b.center[1])? + sq(a.radius, b.radius)?;
        if m == 0 {
            return Err(IncidenceError::Coincident(i, j));
        }
        out.entry(dyadic_exponent_sq(m)).or_default().push((i, j));
    }
    Ok(out)
}

/// Assigns each pair to the bucket `2^⌊log₂|x_i − x_j|⌋`.
pub fn bin_dyadic(
    pairs: &TangencyPairSet,
    x: &CircleFamily,
) -> Result<TangencyPairSet, IncidenceError> {
    let pts = x.points();
    let mut out: BTreeMap<i32, Vec<(u32, u32)>> = BTreeMap::new();
    for &(i, j) in &pairs.pairs {
        let (a, b) = match (pts.get(i as usize), pts.get(j as usize)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(IncidenceError::BadIndex(i, j)),
        };
        let d = a.distance(b);
        if d == 0.0 {
            return Err(IncidenceError::Coincident(i, j));
        }
        out.entry(dyadic_exponent(d)).or_default().push((i, j));
    }
    Ok(TangencyPairSet {
        pairs: pairs.pairs.clone(),
        delta: pairs.delta,
        by_distance: Some(out),
    })
}

/// Indices of the circles whose `10δ`-annulus contains `omega`.
pub fn lift_rect(omega: &Rect2, x: &CircleFamily, delta: f64) -> Vec<usize> {
    x.points()
        .iter()
        .enumerate()
        .filter(|(_, c)| annulus_contains_rect(c, omega, delta))
        .map(|(i, _)| i)
        .collect()
}

/// Largest number of points of an integer family on one light ray, among the
/// lines spanned by tangent pairs. Values of 3 or more mean the family is
/// degenerate (three circles with a common tangency point and normal).
pub fn max_points_on_light_ray(
    x: &CircleFamily,
    pairs: &TangencyPairSet,
) -> Result<usize, IncidenceError> {
    let pts = x.int_points()?;
    let mut lines: HashMap<([i64; 3], [i128; 3]), Vec<u32>> = HashMap::new();
    for &(i, j) in &pairs.pairs {
        let (p, q) = (&pts[i as usize], &pts[j as usize]);
        let pv = [p.center[0], p.center[1], p.radius];
        let qv = [q.center[0], q.center[1], q.radius];
        let mut d = [0i64; 3];
        for k in 0..3 {
            d[k] = qv[k].checked_sub(pv[k]).ok_or(GeometryError::Overflow)?;
        }
        let g = gcd(gcd(d[0].unsigned_abs(), d[1].unsigned_abs()), d[2].unsigned_abs()) as i64;
        if g == 0 {
            return Err(IncidenceError::Coincident(i, j));
        }
        let mut dir = d.map(|v| v / g);
        if dir.iter().find(|&&v| v != 0).copied().unwrap_or(0) < 0 {
            dir = dir.map(|v| -v);
        }
        let pw = pv.map(i128::from);
        let dw = dir.map(i128::from);
        let moment = [
            pw[1] * dw[2] - pw[2] * dw[1],
            pw[2] * dw[0] - pw[0] * dw[2],
            pw[0] * dw[1] - pw[1] * dw[0],
        ];
        let members = lines.entry((dir, moment)).or_default();
        for v in [i, j] {
            if !members.contains(&v) {
                members.push(v);
            }
        }
    }
    Ok(lines.values().map(Vec::len).max().unwrap_or(0))
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{
        gen_clamshell, gen_clamshell_from, gen_clamshell_integer, gen_integer_lattice,
        gen_maximal_separated, GridBox, Provenance,
    };
    use crate::geometry::{tangency_rect, Aabb3};

    fn family(points: Vec<Circle3>) -> CircleFamily {
        CircleFamily::new(points, 1.0, 1.0, Aabb3::cube(-10.0, 10.0), Provenance::new("t")).unwrap()
    }

    #[test]
    fn clamshell_counts() {
        let f = gen_clamshell(10).unwrap();
        assert_eq!(count_ct_delta_bruteforce(&f, 1e-3).unwrap().len(), 45);
        let f = gen_clamshell(100).unwrap();
        assert_eq!(count_ct_delta_hashed(&f, 1e-6).unwrap().len(), 4950);
        assert_eq!(count_ct0_tolerance(&f, None).unwrap().len(), 4950);
    }

    #[test]
    fn small_families() {
        let one = family(vec![Circle3::new(0.0, 0.0, 1.0)]);
        assert!(count_ct_delta_bruteforce(&one, 0.1).unwrap().is_empty());
        assert!(count_ct_delta_hashed(&one, 0.1).unwrap().is_empty());
        let empty = family(vec![]);
        assert!(count_ct_delta_hashed(&empty, 0.1).unwrap().is_empty());
        assert_eq!(
            count_ct_delta_hashed(&empty, 0.0),
            Err(IncidenceError::InvalidDelta(0.0))
        );
    }

    #[test]
    fn grid_baseline_agrees() {
        let g = gen_maximal_separated(64.0, 8.0, GridBox::Cube).unwrap().scaled(1.0 / 64.0);
        let brute = count_ct_delta_bruteforce(&g, 0.05).unwrap();
        let hashed = count_ct_delta_hashed(&g, 0.05).unwrap();
        assert_eq!(brute.pairs, hashed.pairs);
        assert!(!brute.is_empty());
    }

    #[test]
    fn exact_counts() {
        let f = gen_clamshell_integer(12).unwrap();
        let ct = count_ct0_exact(&f).unwrap();
        assert_eq!(ct.len(), 66);
        assert_eq!(max_points_on_light_ray(&f, &ct).unwrap(), 12);

        let lattice = gen_integer_lattice(2).unwrap();
        assert_eq!(
            count_ct0_exact(&lattice).unwrap().pairs,
            count_ct0_bruteforce(&lattice).unwrap().pairs
        );
        let lattice = gen_integer_lattice(5).unwrap();
        assert_eq!(
            count_ct0_exact(&lattice).unwrap().pairs,
            count_ct0_bruteforce(&lattice).unwrap().pairs
        );

        let same_radius: Vec<IntCircle3> = (0..20).map(|k| IntCircle3::new(k, 3 * k, 5)).collect();
        let f = CircleFamily::from_integer(&same_radius, 100.0, 1.0, Aabb3::cube(0.0, 100.0), Provenance::new("t"))
            .unwrap();
        assert!(count_ct0_exact(&f).unwrap().is_empty());
    }

    #[test]
    fn float_and_integer_paths_agree() {
        let lattice = gen_integer_lattice(4).unwrap();
        let exact = count_ct0_exact(&lattice).unwrap();
        let tol = count_ct0_tolerance(&lattice, None).unwrap();
        assert_eq!(exact.pairs, tol.pairs);
        assert_eq!(exact.by_distance, tol.by_distance);
    }

    #[test]
    fn large_coordinates_use_checked_path() {
        let big = 1i64 << 40;
        let pts = [
            IntCircle3::new(big, 0, big),
            IntCircle3::new(big + 3, 4, big + 5),
            IntCircle3::new(big + 1, 1, big + 1),
        ];
        let f = CircleFamily::from_integer(
            &pts,
            4.0 * big as f64,
            1.0,
            Aabb3::cube(-4.0 * big as f64, 4.0 * big as f64),
            Provenance::new("t"),
        )
        .unwrap();
        assert_eq!(count_ct0_exact(&f).unwrap().pairs, vec![(0, 1)]);
    }

    #[test]
    fn dyadic_bins() {
        assert_eq!(dyadic_exponent(1.0), 0);
        assert_eq!(dyadic_exponent(1.999), 0);
        assert_eq!(dyadic_exponent(2.0), 1);
        assert_eq!(dyadic_exponent(0.3), -2);
        assert_eq!(dyadic_exponent_sq(1), 0);
        assert_eq!(dyadic_exponent_sq(3), 0);
        assert_eq!(dyadic_exponent_sq(4), 1);
        assert_eq!(dyadic_exponent_sq(15), 1);
        assert_eq!(dyadic_exponent_sq(16), 2);

        let f = gen_clamshell_from(&[0.125, 0.25, 0.5, 1.0]).unwrap();
        let all = count_ct_delta_bruteforce(&f, 1e-9).unwrap();
        let binned = bin_dyadic(&all, &f).unwrap();
        // Distances are √2·|t_i − t_j|.
        let mut expected: BTreeMap<i32, usize> = BTreeMap::new();
        let ts = [0.125f64, 0.25, 0.5, 1.0];
        for i in 0..4 {
            for j in i + 1..4 {
                let d = std::f64::consts::SQRT_2 * (ts[j] - ts[i]);
                *expected.entry(d.log2().floor() as i32).or_default() += 1;
            }
        }
        let got: BTreeMap<i32, usize> = binned
            .by_distance
            .unwrap()
            .into_iter()
            .map(|(k, v)| (k, v.len()))
            .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn single_bucket_and_coincident() {
        let f = family(vec![Circle3::new(0.0, 0.0, 1.0), Circle3::new(1.0, 0.0, 2.0)]);
        let all = count_ct_delta_bruteforce(&f, 0.1).unwrap();
        let binned = bin_dyadic(&all, &f).unwrap();
        assert_eq!(binned.bucket(0), &[(0, 1)]);
        let fake = TangencyPairSet {
            pairs: vec![(0, 0)],
            delta: 0.1,
            by_distance: None,
        };
        assert_eq!(bin_dyadic(&fake, &f), Err(IncidenceError::Coincident(0, 0)));
    }

    #[test]
    fn lift_rect_examples() {
        let x = Circle3::new(0.0, 0.0, 1.0);
        let y = Circle3::new(1.0, 0.0, 2.0);
        let f = family(vec![x, y, Circle3::new(5.0, 5.0, 1.0)]);
        let omega = tangency_rect(&x, &y, 0.01).unwrap();
        let hits = lift_rect(&omega, &f, 0.01);
        assert!(hits.contains(&0) && hits.contains(&1));

        let clam = gen_clamshell(50).unwrap();
        let omega = Rect2::new([-1.0, 0.0], std::f64::consts::FRAC_PI_2, 0.02, 0.2);
        assert_eq!(lift_rect(&omega, &clam, 0.01).len(), 50);

        let far = Rect2::new([40.0, 40.0], 0.0, 0.02, 0.2);
        assert!(lift_rect(&far, &clam, 0.01).is_empty());
    }
}

//! Circle families and their diagnostics.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use thiserror::Error;

use crate::geometry::{Aabb3, Circle3, IntCircle3};
use crate::spatial::UniformGrid;

/// Largest magnitude for which every integer is exactly representable in f64.
const EXACT_INT_LIMIT: f64 = 9_007_199_254_740_992.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("invalid parameter {param}: {reason}")]
    InvalidParams { param: &'static str, reason: String },
    #[error("family needs at least two points")]
    Empty,
    #[error("point {index} lies outside the declared box")]
    OutsideBox { index: usize },
    #[error("points {first} and {second} are identical")]
    Duplicate { first: usize, second: usize },
    #[error("family is not integer-exact")]
    NotInteger,
}

fn invalid(param: &'static str, reason: impl Into<String>) -> FamilyError {
    FamilyError::InvalidParams {
        param,
        reason: reason.into(),
    }
}

/// Generator name, parameters and seed that produced a family.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Provenance {
    pub generator: String,
    pub params: Vec<(String, String)>,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(generator: impl Into<String>) -> Self {
        Self {
            generator: generator.into(),
            ..Self::default()
        }
    }

    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

/// A finite set of lifted circles with its declared scale, separation and box.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleFamily {
    points: Vec<Circle3>,
    scale_r: f64,
    separation_rho: f64,
    bbox: Aabb3,
    provenance: Provenance,
    integer: bool,
    separated: bool,
}

impl CircleFamily {
    /// Validates box membership and distinctness of the points.
    pub fn new(
        points: Vec<Circle3>,
        scale_r: f64,
        separation_rho: f64,
        bbox: Aabb3,
        provenance: Provenance,
    ) -> Result<Self, FamilyError> {
        if !(scale_r > 0.0) {
            return Err(invalid("R", "scale must be positive"));
        }
        if !(separation_rho > 0.0) {
            return Err(invalid("rho", "separation must be positive"));
        }
        if let Some(index) = points.iter().position(|c| !bbox.contains(&c.point())) {
            return Err(FamilyError::OutsideBox { index });
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        let key = |c: &Circle3| c.point().map(f64::to_bits);
        order.sort_by_key(|&i| key(&points[i]));
        for w in order.windows(2) {
            if points[w[0]].point() == points[w[1]].point() {
                return Err(FamilyError::Duplicate {
                    first: w[0].min(w[1]),
                    second: w[0].max(w[1]),
                });
            }
        }
        let integer = points.iter().all(|c| {
            c.point()
                .iter()
                .all(|v| v.fract() == 0.0 && v.abs() < EXACT_INT_LIMIT)
        });
        Ok(Self {
            points,
            scale_r,
            separation_rho,
            bbox,
            provenance,
            integer,
            separated: false,
        })
    }

    pub fn from_integer(
        points: &[IntCircle3],
        scale_r: f64,
        separation_rho: f64,
        bbox: Aabb3,
        provenance: Provenance,
    ) -> Result<Self, FamilyError> {
        let pts = points.iter().map(IntCircle3::to_float).collect();
        Self::new(pts, scale_r, separation_rho, bbox, provenance)
    }

    /// Marks the family as `separation_rho`-separated.
    pub fn declare_separated(mut self) -> Self {
        self.separated = true;
        self
    }

    /// Checks the declared invariants, including separation if declared.
    pub fn validate(&self) -> Result<(), FamilyError> {
        if let Some(index) = self
            .points
            .iter()
            .position(|c| !self.bbox.contains(&c.point()))
        {
            return Err(FamilyError::OutsideBox { index });
        }
        if self.separated && self.len() >= 2 {
            let check = check_separation(self, self.separation_rho)?;
            if !check.separated {
                return Err(invalid(
                    "rho",
                    format!(
                        "declared {}-separated but min gap is {}",
                        self.separation_rho, check.min_gap
                    ),
                ));
            }
        }
        Ok(())
    }

    pub fn points(&self) -> &[Circle3] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn scale(&self) -> f64 {
        self.scale_r
    }

    pub fn separation(&self) -> f64 {
        self.separation_rho
    }

    pub fn bbox(&self) -> Aabb3 {
        self.bbox
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn is_integer(&self) -> bool {
        self.integer
    }

    pub fn is_declared_separated(&self) -> bool {
        self.separated
    }

    pub fn int_points(&self) -> Result<Vec<IntCircle3>, FamilyError> {
        if !self.integer {
            return Err(FamilyError::NotInteger);
        }
        Ok(self
            .points
            .iter()
            .map(|c| IntCircle3::new(c.center[0] as i64, c.center[1] as i64, c.radius as i64))
            .collect())
    }

    /// Family obtained by dilating every point and the box by `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> Self {
        let mut out = self.clone();
        out.points = self.points.iter().map(|c| c.scaled(lambda)).collect();
        out.scale_r *= lambda;
        out.separation_rho *= lambda;
        out.bbox = Aabb3::new(
            self.bbox.min.map(|v| v * lambda),
            self.bbox.max.map(|v| v * lambda),
        );
        out.integer = out.points.iter().all(|c| {
            c.point()
                .iter()
                .all(|v| v.fract() == 0.0 && v.abs() < EXACT_INT_LIMIT)
        });
        out.provenance = self.provenance.clone().with("scaled", lambda);
        out
    }
}

/// Layout of a deterministic separated grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridBox {
    /// `[0,R]³`
    #[default]
    Cube,
    /// `[-R,R]² × [R,2R]`
    Annular,
}

/// Randomized well-spaced construction: Bernoulli(`p = R^ε ρ^{-3}`) sampling of
/// the integer points in the concentric `ρ`-subcubes of a `100ρ`-grid of `[0,R]³`.
///
/// When `R < 100ρ` the grid has no full cube; the single subcube centered in
/// `[0,R]³` is used instead.
pub fn gen_random_wellspaced(
    r: f64,
    rho: f64,
    eps: f64,
    seed: u64,
) -> Result<CircleFamily, FamilyError> {
    if !(r >= 10.0) {
        return Err(invalid("R", "must be at least 10"));
    }
    if !(eps >= 0.0) {
        return Err(invalid("eps", "must be nonnegative"));
    }
    if !(rho <= r.sqrt()) {
        return Err(invalid("rho", format!("must be at most sqrt(R) = {}", r.sqrt())));
    }
    if !(rho >= r.powf(eps)) {
        return Err(invalid("rho", format!("must be at least R^eps = {}", r.powf(eps))));
    }
    let p = r.powf(eps) / rho.powi(3);
    if !(p <= 1.0) {
        return Err(invalid("rho", format!("inclusion probability R^eps/rho^3 = {p} exceeds 1")));
    }

    let cubes_per_axis = (r / (100.0 * rho)).floor() as usize;
    let centers: Vec<f64> = if cubes_per_axis == 0 {
        vec![r / 2.0]
    } else {
        (0..cubes_per_axis)
            .map(|i| (i as f64 + 0.5) * 100.0 * rho)
            .collect()
    };
    // Integer coordinates inside the half-open interval [c - ρ/2, c + ρ/2).
    let lattice: Vec<Vec<i64>> = centers
        .iter()
        .map(|&c| {
            let lo = (c - rho / 2.0).ceil() as i64;
            let hi = (c + rho / 2.0).ceil() as i64;
            (lo..hi).collect()
        })
        .collect();
    let y_size: u64 = {
        let per_axis: u64 = lattice.iter().map(|l| l.len() as u64).sum();
        per_axis.pow(3)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let geom = Geometric::new(p).map_err(|e| invalid("rho", e.to_string()))?;
    let mut skip = geom.sample(&mut rng);
    let mut points = Vec::new();
    for lx in &lattice {
        for ly in &lattice {
            for lz in &lattice {
                let block = (lx.len() * ly.len() * lz.len()) as u64;
                let mut offset = skip;
                while offset < block {
                    let o = offset as usize;
                    let iz = o % lz.len();
                    let iy = (o / lz.len()) % ly.len();
                    let ix = o / (lz.len() * ly.len());
                    points.push(Circle3::new(lx[ix] as f64, ly[iy] as f64, lz[iz] as f64));
                    offset += 1 + geom.sample(&mut rng);
                }
                skip = offset - block;
            }
        }
    }

    let provenance = Provenance::new("wellspaced")
        .with("R", r)
        .with("rho", rho)
        .with("eps", eps)
        .with("p", p)
        .with("cubes", cubes_per_axis)
        .with("Y", y_size)
        .with_seed(seed);
    CircleFamily::new(points, r, rho, Aabb3::cube(0.0, r), provenance)
}

/// Deterministic `ρ`-grid, `⌊R/ρ⌋ + 1` points per unit of `R` along each axis.
pub fn gen_maximal_separated(r: f64, rho: f64, layout: GridBox) -> Result<CircleFamily, FamilyError> {
    if !(rho >= 1.0) {
        return Err(invalid("rho", "must be at least 1"));
    }
    if !(rho <= r) {
        return Err(invalid("rho", "must be at most R"));
    }
    let steps = |span: f64| (span / rho + 1e-9).floor() as usize;
    let axis = |lo: f64, span: f64| -> Vec<f64> {
        (0..=steps(span)).map(|k| lo + k as f64 * rho).collect()
    };
    let (xs, zs, bbox) = match layout {
        GridBox::Cube => (axis(0.0, r), axis(0.0, r), Aabb3::cube(0.0, r)),
        GridBox::Annular => (axis(-r, 2.0 * r), axis(r, r), Aabb3::annular(r)),
    };
    let mut points = Vec::with_capacity(xs.len() * xs.len() * zs.len());
    for &x in &xs {
        for &y in &xs {
            for &z in &zs {
                points.push(Circle3::new(x, y, z));
            }
        }
    }
    let name = match layout {
        GridBox::Cube => "cube",
        GridBox::Annular => "annular",
    };
    let provenance = Provenance::new("grid")
        .with("R", r)
        .with("rho", rho)
        .with("layout", name);
    Ok(CircleFamily::new(points, r, rho, bbox, provenance)?.declare_separated())
}

/// `N` circles with centers `(t_k, 0)` and radii `1 + t_k`, `t_k = k/N`, all
/// internally tangent at `(-1, 0)`.
pub fn gen_clamshell(n: usize) -> Result<CircleFamily, FamilyError> {
    if n < 2 {
        return Err(invalid("N", "must be at least 2"));
    }
    let ts: Vec<f64> = (1..=n).map(|k| k as f64 / n as f64).collect();
    gen_clamshell_from(&ts)
}

/// Clamshell through `(-1, 0)` with explicit parameters `t ∈ (0, 1]`.
pub fn gen_clamshell_from(ts: &[f64]) -> Result<CircleFamily, FamilyError> {
    if ts.len() < 2 {
        return Err(invalid("N", "must be at least 2"));
    }
    if ts.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
        return Err(invalid("t", "parameters must lie in (0, 1]"));
    }
    let points = ts.iter().map(|&t| Circle3::new(t, 0.0, 1.0 + t)).collect();
    let min_step = {
        let mut s = ts.to_vec();
        s.sort_by(f64::total_cmp);
        s.windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    };
    let provenance = Provenance::new("clamshell").with("N", ts.len());
    CircleFamily::new(
        points,
        1.0,
        (min_step * std::f64::consts::SQRT_2).max(f64::MIN_POSITIVE),
        Aabb3::annular(1.0),
        provenance,
    )
}

/// Integer clamshell: centers `(k, 0)` and radii `1 + k` for `k = 1..=N`.
pub fn gen_clamshell_integer(n: usize) -> Result<CircleFamily, FamilyError> {
    if n < 2 {
        return Err(invalid("N", "must be at least 2"));
    }
    let pts: Vec<IntCircle3> = (1..=n as i64).map(|k| IntCircle3::new(k, 0, 1 + k)).collect();
    let r = (n + 1) as f64;
    CircleFamily::from_integer(
        &pts,
        r,
        std::f64::consts::SQRT_2,
        Aabb3::new([-r, -r, 0.0], [r, r, r + 1.0]),
        Provenance::new("clamshell-int").with("N", n),
    )
}

/// Integer grid of centers `{0..n}²` and radii `{n..2n}`.
pub fn gen_integer_lattice(n: usize) -> Result<CircleFamily, FamilyError> {
    if n < 2 {
        return Err(invalid("n", "must be at least 2"));
    }
    let n = n as i64;
    let mut pts = Vec::with_capacity(((n + 1) * (n + 1) * (n + 1)) as usize);
    for x in 0..=n {
        for y in 0..=n {
            for r in n..=2 * n {
                pts.push(IntCircle3::new(x, y, r));
            }
        }
    }
    let nf = n as f64;
    Ok(CircleFamily::from_integer(
        &pts,
        nf,
        1.0,
        Aabb3::new([0.0, 0.0, nf], [nf, nf, 2.0 * nf]),
        Provenance::new("lattice").with("n", n),
    )?
    .declare_separated())
}

/// `n` points drawn uniformly from `[-1,1]² × [1,2]`, with the observed
/// minimum gap as separation.
pub fn gen_uniform(n: usize, seed: u64) -> Result<CircleFamily, FamilyError> {
    if n < 2 {
        return Err(invalid("N", "must be at least 2"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Circle3> = (0..n)
        .map(|_| {
            Circle3::new(
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
                rng.random_range(1.0..=2.0),
            )
        })
        .collect();
    let rho = min_pairwise_distance(&points).unwrap_or(1.0).max(f64::MIN_POSITIVE);
    let provenance = Provenance::new("uniform").with("N", n).with_seed(seed);
    CircleFamily::new(points, 1.0, rho, Aabb3::annular(1.0), provenance)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationCheck {
    pub separated: bool,
    pub min_gap: f64,
}

/// Minimum pairwise distance and whether it is at least `rho`.
pub fn check_separation(x: &CircleFamily, rho: f64) -> Result<SeparationCheck, FamilyError> {
    let min_gap = min_pairwise_distance(x.points()).ok_or(FamilyError::Empty)?;
    Ok(SeparationCheck {
        separated: min_gap >= rho,
        min_gap,
    })
}

/// Exact closest-pair distance, `None` for fewer than two points.
pub fn min_pairwise_distance(points: &[Circle3]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let pts: Vec<_> = points.iter().map(Circle3::point).collect();
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in &pts {
        for i in 0..3 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let diam = (0..3).map(|i| (hi[i] - lo[i]).powi(2)).sum::<f64>().sqrt();
    let span = (0..3).map(|i| hi[i] - lo[i]).fold(0.0, f64::max);
    // A cell size whose grid holds about one point per cell.
    let mut cell = (span / (pts.len() as f64).cbrt()).max(diam * 1e-9).max(f64::MIN_POSITIVE);
    loop {
        let grid = UniformGrid::build(&pts, [cell; 3], 1 << 10);
        let size = grid.cell_size();
        let mut best = f64::INFINITY;
        for (i, p) in pts.iter().enumerate() {
            for j in grid.neighborhood(grid.cell_of(p), 1) {
                let j = j as usize;
                if j > i {
                    let q = &pts[j];
                    let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt();
                    best = best.min(d);
                }
            }
        }
        // Any pair closer than the smallest cell side sits in adjacent cells.
        let floor = size.iter().fold(f64::INFINITY, |m, &s| m.min(s));
        if best <= floor {
            return Some(best);
        }
        cell *= 2.0;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrostmanLevel {
    pub r: f64,
    pub max_count: usize,
    /// `max_count · δ / r`; bounded for 1-dimensional families.
    pub normalized: f64,
    /// `max_count` relative to the count a uniformly spread family of the same
    /// size would put in an `r`-ball of the declared box.
    pub spread_excess: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrostmanProfile {
    pub delta: f64,
    pub levels: Vec<FrostmanLevel>,
}

impl FrostmanProfile {
    /// Supremum of the 1-dimensional Frostman ratio over all levels.
    pub fn frostman_constant(&self) -> f64 {
        self.levels.iter().map(|l| l.normalized).fold(0.0, f64::max)
    }

    /// Whether some ball holds more than ten times its uniform share: the
    /// family concentrates on a lower-dimensional set.
    pub fn concentrated(&self) -> bool {
        self.levels.iter().any(|l| l.spread_excess > 10.0)
    }
}

/// `max_{x ∈ X} |X ∩ B(x, r)|`, normalized, for dyadic `r ∈ [δ, 1]`.
pub fn check_frostman(x: &CircleFamily, delta: f64) -> Result<FrostmanProfile, FamilyError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", "must lie in (0, 1)"));
    }
    let pts: Vec<_> = x.points().iter().map(Circle3::point).collect();
    let volume = match x.bbox().volume() {
        v if v > 0.0 => v,
        _ => 1.0,
    };
    let mut levels = Vec::new();
    let mut r = 1.0;
    while r >= delta {
        let max_count = if pts.is_empty() {
            0
        } else {
            let grid = UniformGrid::build(&pts, [r; 3], 1 << 9);
            let reach = (r / grid.cell_size().iter().fold(f64::INFINITY, |m, &s| m.min(s)))
                .ceil()
                .max(1.0) as usize;
            pts.iter()
                .map(|p| {
                    grid.neighborhood(grid.cell_of(p), reach)
                        .filter(|&j| {
                            let q = &pts[j as usize];
                            let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2);
                            d2 <= r * r
                        })
                        .count()
                })
                .max()
                .unwrap_or(0)
        };
        let uniform = pts.len() as f64 * (4.0 / 3.0) * PI * r.powi(3) / volume;
        levels.push(FrostmanLevel {
            r,
            max_count,
            normalized: max_count as f64 * delta / r,
            spread_excess: max_count as f64 / uniform.max(1.0),
        });
        r /= 2.0;
    }
    Ok(FrostmanProfile { delta, levels })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyProfile {
    pub cell_size: f64,
    pub max_count: usize,
    /// Number of occupied cells holding each count.
    pub histogram: BTreeMap<usize, usize>,
}

impl OccupancyProfile {
    pub fn total(&self) -> usize {
        self.histogram.iter().map(|(c, n)| c * n).sum()
    }
}

/// Point counts per cell of the `cell`-grid anchored at the box corner.
pub fn cube_occupancy(x: &CircleFamily, cell: f64) -> Result<OccupancyProfile, FamilyError> {
    if !(cell > 0.0) {
        return Err(invalid("cell", "must be positive"));
    }
    let origin = x.bbox().min;
    let mut counts: HashMap<[i64; 3], usize> = HashMap::new();
    for c in x.points() {
        let p = c.point();
        let key = [0, 1, 2].map(|i| ((p[i] - origin[i]) / cell).floor() as i64);
        *counts.entry(key).or_default() += 1;
    }
    let mut histogram = BTreeMap::new();
    for &n in counts.values() {
        *histogram.entry(n).or_default() += 1;
    }
    Ok(OccupancyProfile {
        cell_size: cell,
        max_count: histogram.keys().next_back().copied().unwrap_or(0),
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::delta_gap;

    #[test]
    fn grid_cardinality() {
        let g = gen_maximal_separated(100.0, 10.0, GridBox::Cube).unwrap();
        assert_eq!(g.len(), 1331);
        let one = gen_maximal_separated(37.0, 37.0, GridBox::Cube).unwrap();
        assert!(one.len() <= 8);
        let check = check_separation(&g, 10.0).unwrap();
        assert!(check.separated);
        assert_eq!(check.min_gap, 10.0);
        let ann = gen_maximal_separated(16.0, 4.0, GridBox::Annular).unwrap();
        assert_eq!(ann.len(), 9 * 9 * 5);
        ann.validate().unwrap();
    }

    #[test]
    fn grid_param_errors() {
        assert!(matches!(
            gen_maximal_separated(10.0, 0.5, GridBox::Cube),
            Err(FamilyError::InvalidParams { param: "rho", .. })
        ));
        assert!(gen_maximal_separated(10.0, 11.0, GridBox::Cube).is_err());
    }

    #[test]
    fn clamshell_is_tangent() {
        let f = gen_clamshell_from(&[0.25, 0.5, 1.0]).unwrap();
        let p = f.points();
        for i in 0..3 {
            for j in i + 1..3 {
                assert_eq!(delta_gap(&p[i], &p[j]), 0.0);
            }
        }
        let f = gen_clamshell(100).unwrap();
        let p = f.points();
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                assert!(delta_gap(&p[i], &p[j]) < 1e-12);
            }
        }
        assert!(gen_clamshell(1).is_err());
    }

    #[test]
    fn lattice_cardinality() {
        let f = gen_integer_lattice(2).unwrap();
        assert_eq!(f.len(), 27);
        assert!(f.is_integer());
        assert_eq!(f.int_points().unwrap().len(), 27);
    }

    #[test]
    fn duplicates_are_rejected() {
        let pts = vec![Circle3::new(0.0, 0.0, 1.0), Circle3::new(0.0, 0.0, 1.0)];
        let err = CircleFamily::new(pts, 1.0, 1.0, Aabb3::annular(1.0), Provenance::new("t"));
        assert_eq!(err, Err(FamilyError::Duplicate { first: 0, second: 1 }));
    }

    #[test]
    fn separation_of_coincident_points() {
        assert_eq!(
            min_pairwise_distance(&[Circle3::new(0.0, 0.0, 1.0), Circle3::new(0.0, 0.0, 1.0)]),
            Some(0.0)
        );
        let single = gen_clamshell(2).unwrap();
        assert!(check_separation(&single, 0.1).is_ok());
        let one = CircleFamily::new(
            vec![Circle3::new(0.0, 0.0, 1.0)],
            1.0,
            1.0,
            Aabb3::annular(1.0),
            Provenance::new("t"),
        )
        .unwrap();
        assert_eq!(check_separation(&one, 1.0), Err(FamilyError::Empty));
    }

    #[test]
    fn min_distance_matches_brute_force() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2, 5, 40, 300] {
            let pts: Vec<Circle3> = (0..n)
                .map(|_| {
                    Circle3::new(
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0) * 0.01,
                        rng.random_range(1.0..2.0),
                    )
                })
                .collect();
            let mut brute = f64::INFINITY;
            for i in 0..n {
                for j in i + 1..n {
                    brute = brute.min(pts[i].distance(&pts[j]));
                }
            }
            assert_eq!(min_pairwise_distance(&pts), Some(brute));
        }
    }

    #[test]
    fn wellspaced_is_deterministic_and_in_box() {
        let a = gen_random_wellspaced(4096.0, 64.0, 0.1, 1).unwrap();
        let b = gen_random_wellspaced(4096.0, 64.0, 0.1, 1).unwrap();
        assert_eq!(a, b);
        a.validate().unwrap();
        assert_eq!(a.provenance().param("cubes"), Some("0"));
        assert_eq!(a.provenance().param("Y"), Some("262144"));
    }

    #[test]
    fn wellspaced_param_errors() {
        assert!(matches!(
            gen_random_wellspaced(4096.0, 65.0, 0.1, 1),
            Err(FamilyError::InvalidParams { param: "rho", .. })
        ));
        assert!(matches!(
            gen_random_wellspaced(4096.0, 1.5, 0.5, 1),
            Err(FamilyError::InvalidParams { param: "rho", .. })
        ));
        assert!(gen_random_wellspaced(5.0, 2.0, 0.1, 1).is_err());
    }

    #[test]
    fn wellspaced_cube_separation() {
        // R = 10^6, ρ = 1000: ten 100ρ-cubes per axis.
        let f = gen_random_wellspaced(1e6, 1000.0, 0.0, 9).unwrap();
        assert_eq!(f.provenance().param("cubes"), Some("10"));
        let cube_of = |c: &Circle3| c.point().map(|v| (v / 1e5).floor() as i64);
        let pts = f.points();
        assert!(pts.len() > 100);
        let mut min_inter = f64::INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if cube_of(&pts[i]) != cube_of(&pts[j]) {
                    min_inter = min_inter.min(pts[i].distance(&pts[j]));
                }
            }
        }
        assert!(min_inter >= 99.0 * 1000.0);
        let within = check_separation(&f, 1.0).unwrap();
        assert!(within.min_gap >= 1.0);
    }

    #[test]
    fn occupancy_conservation() {
        let g = gen_maximal_separated(64.0, 8.0, GridBox::Cube).unwrap();
        let occ = cube_occupancy(&g, 8.0).unwrap();
        assert!(occ.max_count <= 8);
        assert_eq!(occ.total(), g.len());
        for cell in [0.3, 3.0, 100.0] {
            assert_eq!(cube_occupancy(&g, cell).unwrap().total(), g.len());
        }
        let empty = CircleFamily::new(vec![], 1.0, 1.0, Aabb3::annular(1.0), Provenance::new("e")).unwrap();
        assert_eq!(cube_occupancy(&empty, 1.0).unwrap().max_count, 0);
    }

    #[test]
    fn frostman_single_point_and_line() {
        let one = CircleFamily::new(
            vec![Circle3::new(0.0, 0.0, 1.5)],
            1.0,
            1.0,
            Aabb3::annular(1.0),
            Provenance::new("t"),
        )
        .unwrap();
        let delta = 1.0 / 64.0;
        let prof = check_frostman(&one, delta).unwrap();
        for l in &prof.levels {
            assert_eq!(l.max_count, 1);
            assert!(l.normalized <= 1.0);
        }
        // δ-grid on a segment of length 1: a ball of radius r = 2^-j δ^-1... holds
        // 2r/δ + 1 points around an interior point, so the ratio is 2 + δ/r.
        let line: Vec<Circle3> = (0..=64).map(|k| Circle3::new(-0.5 + k as f64 * delta, 0.0, 1.5)).collect();
        let fam = CircleFamily::new(line, 1.0, delta, Aabb3::annular(1.0), Provenance::new("line")).unwrap();
        let prof = check_frostman(&fam, delta).unwrap();
        for l in &prof.levels {
            let expected = ((2.0 * l.r / delta) as usize + 1).min(65);
            assert_eq!(l.max_count, expected, "r = {}", l.r);
            assert!(l.normalized <= 3.0 && l.normalized >= 1.0);
        }
        assert!(prof.concentrated());
    }

    #[test]
    fn frostman_clamshell_is_one_dimensional() {
        let f = gen_clamshell(64).unwrap();
        let prof = check_frostman(&f, 1.0 / 64.0).unwrap();
        // Points (t, 0, 1+t) are √2/64 apart along a line: a ball of radius r
        // holds 2⌊r·64/√2⌋ + 1 of them around an interior point.
        for l in &prof.levels {
            let half = (l.r * 64.0 / std::f64::consts::SQRT_2).floor() as usize;
            assert_eq!(l.max_count, (2 * half + 1).min(64), "r = {}", l.r);
        }
        assert!(prof.frostman_constant() <= 2.0);
        assert!(prof.concentrated());

        let grid = gen_maximal_separated(4.0, 1.0, GridBox::Cube).unwrap().scaled(0.25);
        let prof = check_frostman(&grid, 1.0 / 64.0).unwrap();
        assert!(!prof.concentrated());
    }

    #[test]
    fn uniform_is_deterministic() {
        let a = gen_uniform(300, 9).unwrap();
        assert_eq!(a, gen_uniform(300, 9).unwrap());
        assert_ne!(a.points(), gen_uniform(300, 10).unwrap().points());
        assert!(a.points().iter().all(|c| a.bbox().contains(&c.point())));
    }
}

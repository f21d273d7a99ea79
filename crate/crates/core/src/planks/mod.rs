//! Incomparable lightplank collections and their richness.

pub mod lattice;
pub mod rectangles;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rayon::prelude::*;
use thiserror::Error;

use crate::families::CircleFamily;
use crate::geometry::{
    dot3, plank_comparable, plank_contains, rotated_extent, sub3, Aabb3, Circle3, Lightplank, Vec3,
};
use crate::spatial::UniformGrid;

pub use lattice::{LatticeDesign, PlankLattice};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlankError {
    #[error("invalid parameter {param}: {reason}")]
    InvalidParams { param: &'static str, reason: String },
    #[error("planks of a collection must share their dimensions")]
    MixedDimensions,
    #[error("family is empty")]
    EmptyFamily,
}

fn invalid(param: &'static str, reason: impl Into<String>) -> PlankError {
    PlankError::InvalidParams {
        param,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Layout {
    Lattice(PlankLattice),
    Explicit(Vec<Lightplank>),
}

/// Congruent `A × √(AB) × B` lightplanks meeting a box.
#[derive(Debug, Clone)]
pub struct PlankCollection {
    k: f64,
    a_len: f64,
    b_len: f64,
    bbox: Aabb3,
    layout: Layout,
    count: OnceLock<u64>,
}

impl PartialEq for PlankCollection {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k
            && self.a_len == other.a_len
            && self.b_len == other.b_len
            && self.bbox == other.bbox
            && self.layout == other.layout
    }
}

impl PlankCollection {
    /// A caller-supplied collection; pairwise incomparability is not checked
    /// here (see [`verify_incomparable`]).
    pub fn from_planks(planks: Vec<Lightplank>, k: f64, bbox: Aabb3) -> Result<Self, PlankError> {
        if !(k >= 1.0) {
            return Err(invalid("K", "must be at least 1"));
        }
        let (a_len, b_len) = planks.first().map_or((1.0, 1.0), |p| (p.a_len, p.b_len));
        if planks.iter().any(|p| p.a_len != a_len || p.b_len != b_len) {
            return Err(PlankError::MixedDimensions);
        }
        Ok(Self {
            k,
            a_len,
            b_len,
            bbox,
            layout: Layout::Explicit(planks),
            count: OnceLock::new(),
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn dims(&self) -> (f64, f64) {
        (self.a_len, self.b_len)
    }

    /// Length scale `S = B/A`.
    pub fn s(&self) -> f64 {
        self.b_len / self.a_len
    }

    pub fn bbox(&self) -> Aabb3 {
        self.bbox
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn lattice(&self) -> Option<&PlankLattice> {
        match &self.layout {
            Layout::Lattice(l) => Some(l),
            Layout::Explicit(_) => None,
        }
    }

    /// Whether the enumeration is certified maximal (explicit collections are not).
    pub fn is_maximal(&self) -> bool {
        self.lattice().is_some_and(|l| l.maximal)
    }

    pub fn len(&self) -> u64 {
        *self.count.get_or_init(|| match &self.layout {
            Layout::Lattice(l) => (0..l.rows.len())
                .into_par_iter()
                .map(|r| l.row_count(r))
                .sum(),
            Layout::Explicit(p) => p.len() as u64,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All planks, in row order for lattices.
    pub fn planks(&self) -> Vec<Lightplank> {
        match &self.layout {
            Layout::Lattice(l) => {
                let mut out = Vec::new();
                l.for_each_kept(|row, idx| out.push(l.plank(row, idx)));
                out
            }
            Layout::Explicit(p) => p.clone(),
        }
    }

    /// A member comparable to `z`, if one is found.
    pub fn find_comparable(&self, z: &Lightplank) -> Option<Lightplank> {
        match &self.layout {
            Layout::Lattice(l) => l.find_comparable(z),
            Layout::Explicit(p) => p.iter().find(|q| plank_comparable(z, q, self.k)).copied(),
        }
    }

    /// The collection rotated about the x3-axis, as an explicit collection whose
    /// box is the bounding box of the rotated box.
    pub fn rotated_about_vertical(&self, phi: f64) -> Self {
        let planks = self.planks().iter().map(|p| p.rotated_about_vertical(phi)).collect();
        let (s, c) = phi.sin_cos();
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for m in 0..4 {
            let x = if m & 1 == 0 { self.bbox.min[0] } else { self.bbox.max[0] };
            let y = if m & 2 == 0 { self.bbox.min[1] } else { self.bbox.max[1] };
            let r = [c * x - s * y, s * x + c * y];
            for i in 0..2 {
                lo[i] = lo[i].min(r[i]);
                hi[i] = hi[i].max(r[i]);
            }
        }
        lo[2] = self.bbox.min[2];
        hi[2] = self.bbox.max[2];
        Self {
            k: self.k,
            a_len: self.a_len,
            b_len: self.b_len,
            bbox: Aabb3::new(lo, hi),
            layout: Layout::Explicit(planks),
            count: OnceLock::new(),
        }
    }
}

/// Pairwise `K`-incomparable `1 × √S × S` planks meeting `bbox`, laid out as a
/// lattice (see [`lattice`]).
pub fn enumerate_incomparable(r: f64, s: f64, k: f64, bbox: Aabb3) -> Result<PlankCollection, PlankError> {
    if !(s >= 1.0) {
        return Err(invalid("S", "must be at least 1"));
    }
    if !(s <= r) {
        return Err(invalid("S", format!("must be at most R = {r}")));
    }
    enumerate_dims(1.0, s, k, bbox)
}

/// As [`enumerate_incomparable`] for general `A × √(AB) × B` planks.
pub fn enumerate_dims(a_len: f64, b_len: f64, k: f64, bbox: Aabb3) -> Result<PlankCollection, PlankError> {
    if !(k >= 1.0) {
        return Err(invalid("K", "must be at least 1"));
    }
    if !(a_len > 0.0 && b_len >= a_len) {
        return Err(invalid("A", "need 0 < A <= B"));
    }
    Ok(PlankCollection {
        k,
        a_len,
        b_len,
        bbox,
        layout: Layout::Lattice(PlankLattice::new(a_len, b_len, k, bbox)),
        count: OnceLock::new(),
    })
}

/// `|{x ∈ X : x ∈ K·P}|` by direct scan.
pub fn richness(p: &Lightplank, x: &CircleFamily, k: f64) -> usize {
    x.points().iter().filter(|c| plank_contains(p, c, k)).count()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RichPlank {
    pub plank: Lightplank,
    pub count: usize,
}

/// Points of the family, bucketed for plank queries.
pub(crate) struct PointIndex {
    pts: Vec<Vec3>,
    grid: UniformGrid,
}

impl PointIndex {
    pub(crate) fn new(points: &[Circle3], cell: f64) -> Self {
        let pts: Vec<Vec3> = points.iter().map(Circle3::point).collect();
        let grid = UniformGrid::build(&pts, [cell; 3], 256);
        Self { pts, grid }
    }

    pub(crate) fn count_in(&self, p: &Lightplank, k: f64) -> usize {
        if self.pts.is_empty() {
            return 0;
        }
        let h = p.half_widths();
        let axes = p.frame.axes();
        let reach: Vec3 = [0, 1, 2].map(|i| (0..3).map(|j| k * h[j] * axes[j][i].abs()).sum());
        let lo = [0, 1, 2].map(|i| self.grid.axis_index(i, p.center[i] - reach[i]));
        let hi = [0, 1, 2].map(|i| self.grid.axis_index(i, p.center[i] + reach[i]));
        let mut n = 0;
        for z in lo[2]..=hi[2] {
            for y in lo[1]..=hi[1] {
                for x in lo[0]..=hi[0] {
                    n += self
                        .grid
                        .cell_items([x, y, z])
                        .iter()
                        .filter(|&&i| p.contains_point(&self.pts[i as usize], k))
                        .count();
                }
            }
        }
        n
    }
}

pub(crate) fn default_cell(x: &CircleFamily) -> f64 {
    let v = x.bbox().volume();
    let n = x.len().max(1) as f64;
    if v > 0.0 {
        (v / n).cbrt()
    } else {
        x.scale() / n.cbrt()
    }
}

/// Richness of each of `planks`, in order, using a bucket grid on `X`.
pub fn richness_per_plank(planks: &[Lightplank], x: &CircleFamily, k: f64) -> Vec<usize> {
    let index = PointIndex::new(x.points(), default_cell(x));
    planks.par_iter().map(|p| index.count_in(p, k)).collect()
}

/// Per-row sorted codes of lattice planks containing each point.
fn lattice_row_codes(l: &PlankLattice, pts: &[Vec3], row: usize, k: f64) -> Vec<u64> {
    let mut codes = Vec::new();
    let mut buf = Vec::new();
    let r = &l.rows[row];
    for p in pts {
        buf.clear();
        l.tiles_containing(row, p, k, &mut buf);
        codes.extend(buf.iter().map(|&idx| r.encode(idx)));
    }
    codes.sort_unstable();
    codes
}

fn run_lengths(codes: &[u64]) -> impl Iterator<Item = (u64, usize)> + '_ {
    let mut i = 0;
    std::iter::from_fn(move || {
        if i >= codes.len() {
            return None;
        }
        let start = i;
        while i < codes.len() && codes[i] == codes[start] {
            i += 1;
        }
        Some((codes[start], i - start))
    })
}

/// Every plank of the collection with richness at least 1, with its count.
///
/// Lattices are handled by mapping each point to the lattice planks holding
/// it, so the cost is independent of the number of empty planks.
pub fn richness_all(c: &PlankCollection, x: &CircleFamily, k: f64) -> Vec<RichPlank> {
    match c.layout() {
        Layout::Lattice(l) => {
            let pts: Vec<Vec3> = x.points().iter().map(Circle3::point).collect();
            let rows: Vec<Vec<RichPlank>> = (0..l.rows.len())
                .into_par_iter()
                .map(|row| {
                    let codes = lattice_row_codes(l, &pts, row, k);
                    run_lengths(&codes)
                        .map(|(code, count)| RichPlank {
                            plank: l.plank(row, l.rows[row].decode(code)),
                            count,
                        })
                        .collect()
                })
                .collect();
            rows.into_iter().flatten().collect()
        }
        Layout::Explicit(planks) => richness_per_plank(planks, x, k)
            .into_iter()
            .zip(planks)
            .filter(|(n, _)| *n > 0)
            .map(|(count, plank)| RichPlank { plank: *plank, count })
            .collect(),
    }
}

/// Exponent `j` of the dyadic bucket `[2^j, 2^{j+1})` holding `count >= 1`.
pub fn mu_exponent(count: usize) -> u32 {
    debug_assert!(count > 0);
    usize::BITS - 1 - count.leading_zeros()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RichnessTable {
    pub total_planks: u64,
    pub rich: Vec<RichPlank>,
    /// Indices into `rich`, keyed by the dyadic exponent of the richness.
    pub mu_buckets: BTreeMap<u32, Vec<usize>>,
}

impl RichnessTable {
    /// `μ ↦ |𝒫_μ|` for dyadic `μ`.
    pub fn bucket_sizes(&self) -> BTreeMap<u64, u64> {
        self.mu_buckets
            .iter()
            .map(|(&j, v)| (1u64 << j, v.len() as u64))
            .collect()
    }
}

/// Dyadic bucketing of the collection by richness (`K = 1`).
pub fn mu_buckets(c: &PlankCollection, x: &CircleFamily) -> RichnessTable {
    let rich = richness_all(c, x, 1.0);
    let mut mu: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, r) in rich.iter().enumerate() {
        mu.entry(mu_exponent(r.count)).or_default().push(i);
    }
    RichnessTable {
        total_planks: c.len(),
        rich,
        mu_buckets: mu,
    }
}

/// Multiset of nonzero richness values, without materializing planks.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RichnessHistogram {
    /// richness ↦ number of planks with that richness.
    pub counts: BTreeMap<usize, u64>,
}

impl RichnessHistogram {
    pub fn bucket_sizes(&self) -> BTreeMap<u64, u64> {
        let mut out = BTreeMap::new();
        for (&r, &n) in &self.counts {
            *out.entry(1u64 << mu_exponent(r)).or_default() += n;
        }
        out
    }

    pub fn rich_planks(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn max(&self) -> Option<usize> {
        self.counts.keys().next_back().copied()
    }

    pub fn min(&self) -> Option<usize> {
        self.counts.keys().next().copied()
    }
}

pub fn mu_histogram(c: &PlankCollection, x: &CircleFamily, k: f64) -> RichnessHistogram {
    let mut counts = BTreeMap::new();
    match c.layout() {
        Layout::Lattice(l) => {
            let pts: Vec<Vec3> = x.points().iter().map(Circle3::point).collect();
            let per_row: Vec<BTreeMap<usize, u64>> = (0..l.rows.len())
                .into_par_iter()
                .map(|row| {
                    let codes = lattice_row_codes(l, &pts, row, k);
                    let mut m = BTreeMap::new();
                    for (_, n) in run_lengths(&codes) {
                        *m.entry(n).or_default() += 1;
                    }
                    m
                })
                .collect();
            for m in per_row {
                for (r, n) in m {
                    *counts.entry(r).or_default() += n;
                }
            }
        }
        Layout::Explicit(_) => {
            for r in richness_all(c, x, k) {
                *counts.entry(r.count).or_default() += 1;
            }
        }
    }
    RichnessHistogram { counts }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VerifyStats {
    pub planks: usize,
    pub rows: usize,
    /// Row pairs certified incomparable by their angle alone.
    pub separated_row_pairs: usize,
    pub tested_pairs: u64,
}

/// Exhaustive pairwise incomparability check.
///
/// Two planks of angles differing by `dθ` can only be comparable if one,
/// seen in the other's frame, has short-axis extent at most `K·A/2`; row pairs
/// failing that are skipped as a whole. Within the remaining row pairs, a
/// comparable pair must have centers within `K·A/2` (plus a rotation allowance)
/// along a short axis, so a sweep over sorted short-axis coordinates finds all
/// candidates, which are then tested exactly.
pub fn verify_incomparable(c: &PlankCollection) -> Result<VerifyStats, (Lightplank, Lightplank)> {
    let planks = c.planks();
    let k = c.k();
    let mut rows: BTreeMap<u64, Vec<Lightplank>> = BTreeMap::new();
    for p in &planks {
        rows.entry(p.theta().to_bits()).or_default().push(*p);
    }
    let rows: Vec<Vec<Lightplank>> = rows.into_values().collect();
    let mut stats = VerifyStats {
        planks: planks.len(),
        rows: rows.len(),
        ..VerifyStats::default()
    };
    let Some(first) = planks.first() else {
        return Ok(stats);
    };
    let h = first.half_widths();
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in &planks {
        for i in 0..3 {
            lo[i] = lo[i].min(p.center[i]);
            hi[i] = hi[i].max(p.center[i]);
        }
    }
    let diam = (0..3).map(|i| (hi[i] - lo[i]).powi(2)).sum::<f64>().sqrt();

    for r1 in 0..rows.len() {
        for r2 in r1..rows.len() {
            let f1 = rows[r1][0].frame;
            let f2 = rows[r2][0].frame;
            if r1 != r2 && rotated_extent(&h, f2.theta - f1.theta)[0] > k * h[0] * (1.0 + 1e-9) {
                stats.separated_row_pairs += 1;
                continue;
            }
            let da = sub3(&f1.axis_a, &f2.axis_a);
            let window = k * h[0] * (1.0 + 1e-9) + diam * dot3(&da, &da).sqrt();
            let key = |p: &Lightplank| dot3(&p.center, &f1.axis_a);
            let mut sorted: Vec<(f64, usize)> = rows[r2].iter().enumerate().map(|(i, p)| (key(p), i)).collect();
            sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
            for (i1, p) in rows[r1].iter().enumerate() {
                let a = key(p);
                let start = sorted.partition_point(|e| e.0 < a - window);
                for &(a2, i2) in &sorted[start..] {
                    if a2 > a + window {
                        break;
                    }
                    if r1 == r2 && i2 <= i1 {
                        continue;
                    }
                    let q = &rows[r2][i2];
                    stats.tested_pairs += 1;
                    if plank_comparable(p, q, k) {
                        return Err((*p, *q));
                    }
                }
            }
        }
    }
    Ok(stats)
}

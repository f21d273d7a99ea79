//! Implicit lattices of congruent lightplanks.
//!
//! Planks are arranged in rows of a common angle. Row angles are spaced so
//! widely that a plank of one row, seen in the frame of another, is thicker
//! along the short axis than the `K`-dilated short side; distinct rows are then
//! incomparable without any pairwise test. Within a row the planks are
//! translates on a rectangular lattice whose spacing exceeds `(K−1)` half-widths
//! (incomparability) while staying small enough that every plank of the box
//! fits in the `K`-dilation of its nearest lattice plank (maximality).

use std::f64::consts::PI;

use crate::geometry::{dot3, plank_axes, plank_comparable, rotated_extent, sub3, Aabb3, Lightplank, PlankFrame, Vec3};

/// Relative safety margin applied on both sides of the spacing window.
const MARGIN: f64 = 1e-6;
/// Resolution of the scan for the smallest admissible row spacing.
const ANGLE_STEPS: usize = 1 << 15;

/// Row angles and in-row spacing for planks of half-widths `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeDesign {
    pub thetas: Vec<f64>,
    pub spacing: Vec3,
    /// Whether every plank meeting the box is comparable to a lattice plank.
    pub maximal: bool,
}

fn rows_incomparable(h: &Vec3, k: f64, dtheta: f64) -> bool {
    rotated_extent(h, dtheta)[0] > k * h[0] * (1.0 + MARGIN)
}

/// Upper bound of [`rotated_extent`] over `|dθ| <= half`, for `half <= π/2`.
fn extent_bound(h: &Vec3, half: f64) -> Vec3 {
    let s = half.sin() * std::f64::consts::FRAC_1_SQRT_2;
    let c = (1.0 - half.cos()) / 2.0;
    [
        h[0] + h[1] * s + h[2] * c,
        h[0] * s + h[1] + h[2] * s,
        h[0] * c + h[1] * s + h[2],
    ]
}

/// Chooses row angles and spacing for `a × √(ab) × b` planks and dilation `k`.
pub fn design(a_len: f64, b_len: f64, k: f64) -> LatticeDesign {
    let h = [a_len / 2.0, (a_len * b_len).sqrt() / 2.0, b_len / 2.0];
    let step = PI / ANGLE_STEPS as f64;
    let good: Vec<bool> = (0..=ANGLE_STEPS)
        .map(|i| rows_incomparable(&h, k, i as f64 * step))
        .collect();

    let fallback_spacing = h.map(|v| 2.0 * k * v);
    let (thetas, full_circle) = if good[ANGLE_STEPS] {
        // Every difference in [d_min, π] separates rows.
        let last_bad = good.iter().rposition(|g| !g).unwrap_or(0);
        let d_min = (last_bad + 1) as f64 * step;
        let mut n = ((2.0 * PI / d_min).floor() as usize).max(1);
        while n > 1 && !(1..n).all(|m| rows_incomparable(&h, k, m as f64 * 2.0 * PI / n as f64)) {
            n -= 1;
        }
        ((0..n).map(|r| r as f64 * 2.0 * PI / n as f64).collect::<Vec<_>>(), n > 1)
    } else if let Some(first) = good.iter().position(|&g| g) {
        // Only a window of differences separates rows: stack rows inside it.
        let end = good[first..].iter().position(|g| !g).map_or(ANGLE_STEPS, |e| first + e);
        let d_lo = first as f64 * step;
        let d_hi = (end - 1) as f64 * step;
        let mut n = (d_hi / d_lo).floor() as usize + 1;
        while n > 1 && !(1..n).all(|m| rows_incomparable(&h, k, m as f64 * d_lo)) {
            n -= 1;
        }
        ((0..n).map(|r| r as f64 * d_lo).collect(), false)
    } else {
        (vec![0.0], false)
    };

    if full_circle {
        let half = PI / thetas.len() as f64;
        if half <= PI / 2.0 {
            let e = extent_bound(&h, half);
            let s: Vec3 = [0, 1, 2].map(|j| 2.0 * (k * h[j] - e[j]) * (1.0 - MARGIN));
            let feasible = (0..3).all(|j| s[j] > (k - 1.0) * h[j] * (1.0 + MARGIN));
            if feasible {
                return LatticeDesign {
                    thetas,
                    spacing: s,
                    maximal: true,
                };
            }
        }
    }
    LatticeDesign {
        thetas,
        spacing: fallback_spacing,
        maximal: false,
    }
}

/// One row of the lattice: a frame and the candidate index box.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeRow {
    pub frame: PlankFrame,
    pub lo: [i64; 3],
    pub hi: [i64; 3],
}

impl LatticeRow {
    pub fn extent(&self) -> [u64; 3] {
        [0, 1, 2].map(|j| (self.hi[j] - self.lo[j] + 1).max(0) as u64)
    }

    /// Dense code of an index triple inside this row's index box.
    #[inline]
    pub fn encode(&self, idx: [i64; 3]) -> u64 {
        let e = self.extent();
        (((idx[0] - self.lo[0]) as u64 * e[1]) + (idx[1] - self.lo[1]) as u64) * e[2]
            + (idx[2] - self.lo[2]) as u64
    }

    #[inline]
    pub fn decode(&self, code: u64) -> [i64; 3] {
        let e = self.extent();
        let k = code % e[2];
        let j = (code / e[2]) % e[1];
        let i = code / (e[1] * e[2]);
        [
            i as i64 + self.lo[0],
            j as i64 + self.lo[1],
            k as i64 + self.lo[2],
        ]
    }
}

/// Lattice planks meeting a box, stored implicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct PlankLattice {
    pub a_len: f64,
    pub b_len: f64,
    pub k: f64,
    pub bbox: Aabb3,
    pub origin: Vec3,
    pub spacing: Vec3,
    pub rows: Vec<LatticeRow>,
    pub maximal: bool,
}

impl PlankLattice {
    pub fn new(a_len: f64, b_len: f64, k: f64, bbox: Aabb3) -> Self {
        let d = design(a_len, b_len, k);
        let origin = bbox.center();
        let h = [a_len / 2.0, (a_len * b_len).sqrt() / 2.0, b_len / 2.0];
        let corners: Vec<Vec3> = (0..8)
            .map(|m| [0, 1, 2].map(|i| if m & (1 << i) == 0 { bbox.min[i] } else { bbox.max[i] }))
            .collect();
        let rows = d
            .thetas
            .iter()
            .map(|&t| {
                let frame = plank_axes(t);
                let axes = frame.axes();
                let mut lo = [0i64; 3];
                let mut hi = [0i64; 3];
                for j in 0..3 {
                    let proj = corners.iter().map(|c| dot3(&sub3(c, &origin), &axes[j]));
                    let pmin = proj.clone().fold(f64::INFINITY, f64::min) - h[j];
                    let pmax = proj.fold(f64::NEG_INFINITY, f64::max) + h[j];
                    lo[j] = (pmin / d.spacing[j]).ceil() as i64 - 1;
                    hi[j] = (pmax / d.spacing[j]).floor() as i64 + 1;
                }
                LatticeRow { frame, lo, hi }
            })
            .collect();
        Self {
            a_len,
            b_len,
            k,
            bbox,
            origin,
            spacing: d.spacing,
            rows,
            maximal: d.maximal,
        }
    }

    pub fn half_widths(&self) -> Vec3 {
        [
            self.a_len / 2.0,
            (self.a_len * self.b_len).sqrt() / 2.0,
            self.b_len / 2.0,
        ]
    }

    #[inline]
    pub fn center(&self, row: usize, idx: [i64; 3]) -> Vec3 {
        let local = [0, 1, 2].map(|j| idx[j] as f64 * self.spacing[j]);
        let w = self.rows[row].frame.to_world(&local);
        [0, 1, 2].map(|i| self.origin[i] + w[i])
    }

    pub fn plank(&self, row: usize, idx: [i64; 3]) -> Lightplank {
        Lightplank {
            frame: self.rows[row].frame,
            center: self.center(row, idx),
            a_len: self.a_len,
            b_len: self.b_len,
        }
    }

    /// Range of `c`-indices `k` for which the plank at `(i, j, k)` meets the
    /// box, from the separating-axis constraints, which are linear in `k`.
    pub fn kept_c_range(&self, row: usize, i: i64, j: i64) -> Option<(i64, i64)> {
        let r = &self.rows[row];
        let axes = r.frame.axes();
        let half = self.half_widths();
        let bc = self.bbox.center();
        let bh = self.bbox.half_extents();
        let base = sub3(&self.center(row, [i, j, 0]), &bc);
        let step: Vec3 = axes[2].map(|v| v * self.spacing[2]);
        let world = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let mut tests: Vec<Vec3> = Vec::with_capacity(15);
        tests.extend_from_slice(&world);
        tests.extend_from_slice(&axes);
        for w in &world {
            for a in &axes {
                tests.push([
                    w[1] * a[2] - w[2] * a[1],
                    w[2] * a[0] - w[0] * a[2],
                    w[0] * a[1] - w[1] * a[0],
                ]);
            }
        }
        let mut tmin = r.lo[2] as f64;
        let mut tmax = r.hi[2] as f64;
        for l in &tests {
            if dot3(l, l).sqrt() < 1e-12 {
                continue;
            }
            let rad: f64 = (0..3).map(|q| bh[q] * l[q].abs()).sum::<f64>()
                + (0..3).map(|q| half[q] * dot3(&axes[q], l).abs()).sum::<f64>();
            let b0 = dot3(&base, l);
            let slope = dot3(&step, l);
            if slope.abs() < 1e-12 * (1.0 + base.iter().map(|v| v.abs()).sum::<f64>()) {
                if b0.abs() > rad {
                    return None;
                }
                continue;
            }
            let (t0, t1) = ((-rad - b0) / slope, (rad - b0) / slope);
            tmin = tmin.max(t0.min(t1));
            tmax = tmax.min(t0.max(t1));
        }
        let lo = tmin.ceil() as i64;
        let hi = tmax.floor() as i64;
        (lo <= hi).then_some((lo.max(r.lo[2]), hi.min(r.hi[2])))
    }

    pub fn is_kept(&self, row: usize, idx: [i64; 3]) -> bool {
        self.kept_c_range(row, idx[0], idx[1])
            .is_some_and(|(lo, hi)| idx[2] >= lo && idx[2] <= hi)
    }

    /// Number of kept planks in one row.
    pub fn row_count(&self, row: usize) -> u64 {
        let r = &self.rows[row];
        let mut n = 0;
        for i in r.lo[0]..=r.hi[0] {
            for j in r.lo[1]..=r.hi[1] {
                if let Some((lo, hi)) = self.kept_c_range(row, i, j) {
                    n += (hi - lo + 1) as u64;
                }
            }
        }
        n
    }

    /// Calls `f(row, idx)` for every kept plank, row by row.
    pub fn for_each_kept(&self, mut f: impl FnMut(usize, [i64; 3])) {
        for (row, r) in self.rows.iter().enumerate() {
            for i in r.lo[0]..=r.hi[0] {
                for j in r.lo[1]..=r.hi[1] {
                    if let Some((lo, hi)) = self.kept_c_range(row, i, j) {
                        for k in lo..=hi {
                            f(row, [i, j, k]);
                        }
                    }
                }
            }
        }
    }

    /// Kept lattice positions of row `row` whose `kdil`-dilation contains `p`.
    pub fn tiles_containing(&self, row: usize, p: &Vec3, kdil: f64, out: &mut Vec<[i64; 3]>) {
        let r = &self.rows[row];
        let c = r.frame.coords(&sub3(p, &self.origin));
        let h = self.half_widths();
        let mut lo = [0i64; 3];
        let mut hi = [0i64; 3];
        for j in 0..3 {
            let reach = kdil * h[j];
            lo[j] = (((c[j] - reach) / self.spacing[j]).floor() as i64).max(r.lo[j]);
            hi[j] = (((c[j] + reach) / self.spacing[j]).ceil() as i64).min(r.hi[j]);
        }
        let inside_box = self.bbox.contains(p);
        for i in lo[0]..=hi[0] {
            for j in lo[1]..=hi[1] {
                let mut kept: Option<Option<(i64, i64)>> = None;
                for k in lo[2]..=hi[2] {
                    let idx = [i, j, k];
                    if !self.plank(row, idx).contains_point(p, kdil) {
                        continue;
                    }
                    // A plank holding a point of the box meets the box.
                    let ok = (kdil <= 1.0 && inside_box)
                        || kept
                            .get_or_insert_with(|| self.kept_c_range(row, i, j))
                            .is_some_and(|(a, b)| k >= a && k <= b);
                    if ok {
                        out.push(idx);
                    }
                }
            }
        }
    }

    /// A kept plank comparable to `z`, searching the lattice positions nearest
    /// to `z` in the two closest rows.
    pub fn find_comparable(&self, z: &Lightplank) -> Option<Lightplank> {
        let n = self.rows.len();
        let mut order: Vec<usize> = (0..n).collect();
        let dist = |row: usize| {
            let d = (z.theta() - self.rows[row].frame.theta).rem_euclid(2.0 * PI);
            d.min(2.0 * PI - d)
        };
        order.sort_by(|&a, &b| dist(a).total_cmp(&dist(b)));
        for &row in order.iter().take(2) {
            let c = self.rows[row].frame.coords(&sub3(&z.center, &self.origin));
            let base = [0, 1, 2].map(|j| (c[j] / self.spacing[j]).round() as i64);
            for di in -1..=1 {
                for dj in -1..=1 {
                    for dk in -1..=1 {
                        let idx = [base[0] + di, base[1] + dj, base[2] + dk];
                        let q = self.plank(row, idx);
                        if plank_comparable(z, &q, self.k) && self.is_kept(row, idx) {
                            return Some(q);
                        }
                    }
                }
            }
        }
        None
    }
}

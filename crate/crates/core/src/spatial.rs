//! Uniform bucket grid over points of R³, stored in compressed-row form.

use crate::geometry::Vec3;

#[derive(Debug, Clone)]
pub struct UniformGrid {
    origin: Vec3,
    upper: Vec3,
    cell: Vec3,
    dims: [usize; 3],
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl UniformGrid {
    /// Buckets `points` into cells of side `cell[i]` along axis `i`.
    ///
    /// The number of cells per axis is capped at `max_per_axis`; cells grow to
    /// cover the bounding box when the cap binds.
    pub fn build(points: &[Vec3], cell: Vec3, max_per_axis: usize) -> Self {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in points {
            for i in 0..3 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        if points.is_empty() {
            lo = [0.0; 3];
            hi = [0.0; 3];
        }
        let mut dims = [1usize; 3];
        let mut cell = cell;
        for i in 0..3 {
            let span = hi[i] - lo[i];
            let want = (span / cell[i]).floor() as usize + 1;
            if want > max_per_axis {
                dims[i] = max_per_axis;
                cell[i] = span / (max_per_axis as f64 - 0.5);
            } else {
                dims[i] = want.max(1);
            }
        }
        let ncells = dims[0] * dims[1] * dims[2];
        let mut grid = Self {
            origin: lo,
            upper: hi,
            cell,
            dims,
            starts: vec![0; ncells + 1],
            items: vec![0; points.len()],
        };
        let keys: Vec<usize> = points.iter().map(|p| grid.flat(grid.cell_of(p))).collect();
        for &k in &keys {
            grid.starts[k + 1] += 1;
        }
        for i in 0..ncells {
            grid.starts[i + 1] += grid.starts[i];
        }
        let mut fill = grid.starts.clone();
        for (idx, &k) in keys.iter().enumerate() {
            grid.items[fill[k] as usize] = idx as u32;
            fill[k] += 1;
        }
        grid
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn cell_size(&self) -> Vec3 {
        self.cell
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn cell_of(&self, p: &Vec3) -> [usize; 3] {
        let mut out = [0; 3];
        for i in 0..3 {
            let t = ((p[i] - self.origin[i]) / self.cell[i]).floor();
            out[i] = if t <= 0.0 {
                0
            } else {
                (t as usize).min(self.dims[i] - 1)
            };
        }
        out
    }

    /// Cell index along `axis` for coordinate `v`, clamped into the grid.
    pub fn axis_index(&self, axis: usize, v: f64) -> usize {
        let t = ((v - self.origin[axis]) / self.cell[axis]).floor();
        if t <= 0.0 {
            0
        } else {
            (t as usize).min(self.dims[axis] - 1)
        }
    }

    /// Closed coordinate interval covering every point bucketed in cell `i`
    /// along `axis`.
    pub fn axis_bounds(&self, axis: usize, i: usize) -> (f64, f64) {
        let lo = self.origin[axis] + i as f64 * self.cell[axis];
        let mut hi = lo + self.cell[axis];
        if i + 1 == self.dims[axis] {
            hi = hi.max(self.upper[axis]);
        }
        (lo, hi)
    }

    #[inline]
    fn flat(&self, c: [usize; 3]) -> usize {
        (c[2] * self.dims[1] + c[1]) * self.dims[0] + c[0]
    }

    #[inline]
    pub fn cell_items(&self, c: [usize; 3]) -> &[u32] {
        let k = self.flat(c);
        &self.items[self.starts[k] as usize..self.starts[k + 1] as usize]
    }

    /// Indices of points in cells within `reach` cells of `c` along each axis.
    pub fn neighborhood(&self, c: [usize; 3], reach: usize) -> impl Iterator<Item = u32> + '_ {
        let [rx, ry, rz] =
            [0, 1, 2].map(|i| c[i].saturating_sub(reach)..=(c[i] + reach).min(self.dims[i] - 1));
        rz.flat_map(move |z| {
            let rx = rx.clone();
            ry.clone().flat_map(move |y| {
                rx.clone().flat_map(move |x| self.cell_items([x, y, z]).iter().copied())
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_point_is_bucketed_once() {
        let pts: Vec<Vec3> = (0..500)
            .map(|i| {
                let t = i as f64;
                [t.sin() * 3.0, (t * 0.7).cos(), t.fract() + (i % 7) as f64]
            })
            .collect();
        let g = UniformGrid::build(&pts, [0.5, 0.5, 0.5], 64);
        let d = g.dims();
        let mut seen = vec![false; pts.len()];
        for z in 0..d[2] {
            for y in 0..d[1] {
                for x in 0..d[0] {
                    for &i in g.cell_items([x, y, z]) {
                        assert!(!seen[i as usize]);
                        seen[i as usize] = true;
                        assert_eq!(g.cell_of(&pts[i as usize]), [x, y, z]);
                    }
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn empty_grid() {
        let g = UniformGrid::build(&[], [1.0; 3], 8);
        assert_eq!(g.neighborhood([0, 0, 0], 1).count(), 0);
    }
}

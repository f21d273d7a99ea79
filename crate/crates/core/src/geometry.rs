//! Primitives of the lifted circle space.
//!
//! A planar circle with center `(x1, x2)` and radius `x3` is identified with the
//! point `(x1, x2, x3)` of the upper half-space. Internal tangency of two circles
//! becomes the condition that their lifted points differ by a null (light-like)
//! vector, which is what [`delta_gap`] measures.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use thiserror::Error;

pub type Vec3 = [f64; 3];
pub type Vec2 = [f64; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("integer overflow while evaluating the tangency identity")]
    Overflow,
    #[error("circles are concentric; the tangency point is undefined")]
    Concentric,
    #[error("circles are not near tangent: gap {gap} >= delta {delta}")]
    NotNearTangent { gap: f64, delta: f64 },
}

#[inline]
pub(crate) fn dot3(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn sub3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub(crate) fn norm3(a: &Vec3) -> f64 {
    dot3(a, a).sqrt()
}

#[inline]
fn cross3(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Wraps an angle into `[-π, π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t >= PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// A circle encoded as a point of R³: planar center plus radius as height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle3 {
    pub center: Vec2,
    pub radius: f64,
}

impl Circle3 {
    pub const fn new(x1: f64, x2: f64, radius: f64) -> Self {
        Self {
            center: [x1, x2],
            radius,
        }
    }

    pub const fn from_point(p: Vec3) -> Self {
        Self::new(p[0], p[1], p[2])
    }

    pub const fn point(&self) -> Vec3 {
        [self.center[0], self.center[1], self.radius]
    }

    /// Euclidean distance between the lifted points.
    pub fn distance(&self, other: &Circle3) -> f64 {
        norm3(&sub3(&self.point(), &other.point()))
    }

    pub fn planar_distance(&self, other: &Circle3) -> f64 {
        (self.center[0] - other.center[0]).hypot(self.center[1] - other.center[1])
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self::new(
            self.center[0] * lambda,
            self.center[1] * lambda,
            self.radius * lambda,
        )
    }

    /// Rotation of the plane about the origin, which rotates the lifted point
    /// about the x3-axis.
    pub fn rotated_about_vertical(&self, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self::new(
            c * self.center[0] - s * self.center[1],
            s * self.center[0] + c * self.center[1],
            self.radius,
        )
    }
}

/// Integer-exact circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntCircle3 {
    pub center: [i64; 2],
    pub radius: i64,
}

impl IntCircle3 {
    pub const fn new(x1: i64, x2: i64, radius: i64) -> Self {
        Self {
            center: [x1, x2],
            radius,
        }
    }

    pub fn to_float(&self) -> Circle3 {
        Circle3::new(
            self.center[0] as f64,
            self.center[1] as f64,
            self.radius as f64,
        )
    }

    /// Squared Euclidean distance between lifted points, or `None` on overflow.
    pub fn checked_distance_sq(&self, other: &IntCircle3) -> Option<i64> {
        let d1 = self.center[0].checked_sub(other.center[0])?;
        let d2 = self.center[1].checked_sub(other.center[1])?;
        let d3 = self.radius.checked_sub(other.radius)?;
        d1.checked_mul(d1)?
            .checked_add(d2.checked_mul(d2)?)?
            .checked_add(d3.checked_mul(d3)?)
    }
}

/// The tangency gap `||x̄ − ȳ| − |x3 − y3||`.
///
/// Zero exactly when the encoded circles are internally tangent.
pub fn delta_gap(x: &Circle3, y: &Circle3) -> f64 {
    (x.planar_distance(y) - (x.radius - y.radius).abs()).abs()
}

/// Exact internal tangency test `(x1−y1)² + (x2−y2)² = (x3−y3)²`.
///
/// Identical circles are not tangent. Overflow is reported, never wrapped.
pub fn is_exact_tangent_int(x: &IntCircle3, y: &IntCircle3) -> Result<bool, GeometryError> {
    if x == y {
        return Ok(false);
    }
    let sq = |a: i64, b: i64| -> Result<i128, GeometryError> {
        let d = a.checked_sub(b).ok_or(GeometryError::Overflow)?;
        Ok(i128::from(d) * i128::from(d))
    };
    let lhs = sq(x.center[0], y.center[0])? + sq(x.center[1], y.center[1])?;
    let rhs = sq(x.radius, y.radius)?;
    Ok(lhs == rhs)
}

/// A planar rectangle with long axis at `angle`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect2 {
    pub center: Vec2,
    /// Direction of the long side, in `[0, π)`.
    pub angle: f64,
    /// Short side.
    pub width: f64,
    /// Long side.
    pub length: f64,
}

impl Rect2 {
    /// Builds a rectangle, swapping sides if needed so that `width <= length`.
    pub fn new(center: Vec2, angle: f64, width: f64, length: f64) -> Self {
        let (width, length, angle) = if width <= length {
            (width, length, angle)
        } else {
            (length, width, angle + PI / 2.0)
        };
        Self {
            center,
            angle: angle.rem_euclid(PI),
            width,
            length,
        }
    }

    /// Unit vectors along the long and short sides.
    pub fn axes(&self) -> (Vec2, Vec2) {
        let (s, c) = self.angle.sin_cos();
        ([c, s], [-s, c])
    }

    pub fn corners(&self) -> [Vec2; 4] {
        let (long, short) = self.axes();
        let hl = self.length / 2.0;
        let hw = self.width / 2.0;
        let mut out = [[0.0; 2]; 4];
        let signs = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];
        for (slot, (sl, sw)) in out.iter_mut().zip(signs) {
            *slot = [
                self.center[0] + sl * hl * long[0] + sw * hw * short[0],
                self.center[1] + sl * hl * long[1] + sw * hw * short[1],
            ];
        }
        out
    }

    /// Euclidean distance from `p` to the closed rectangle, 0 if `p` is inside.
    pub fn distance_to(&self, p: Vec2) -> f64 {
        let (long, short) = self.axes();
        let d = [p[0] - self.center[0], p[1] - self.center[1]];
        let u = d[0] * long[0] + d[1] * long[1];
        let v = d[0] * short[0] + d[1] * short[1];
        let eu = (u.abs() - self.length / 2.0).max(0.0);
        let ev = (v.abs() - self.width / 2.0).max(0.0);
        eu.hypot(ev)
    }

    /// Largest distance from `p` to a point of the rectangle (attained at a corner).
    pub fn max_distance_to(&self, p: Vec2) -> f64 {
        self.corners()
            .iter()
            .map(|c| (c[0] - p[0]).hypot(c[1] - p[1]))
            .fold(0.0, f64::max)
    }
}

/// Whether `Ω ⊂ C_{10δ,x}`, i.e. every point of the rectangle lies strictly
/// inside the 10δ-thick annulus around the circle `x`.
pub fn annulus_contains_rect(x: &Circle3, rect: &Rect2, delta: f64) -> bool {
    let thick = 10.0 * delta;
    rect.max_distance_to(x.center) < x.radius + thick
        && rect.distance_to(x.center) > x.radius - thick
}

/// Tangency point and outward normal of a near-tangent pair.
///
/// The larger circle locates the point; for equal radii the circle whose center
/// is lexicographically smaller plays that role.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangencyPoint {
    pub point: Vec2,
    /// Unit vector from the larger circle's center toward the tangency point.
    pub normal: Vec2,
}

impl TangencyPoint {
    pub fn normal_angle(&self) -> f64 {
        self.normal[1].atan2(self.normal[0])
    }
}

fn ordered_by_size<'a>(x: &'a Circle3, y: &'a Circle3) -> (&'a Circle3, &'a Circle3) {
    let x_big = match x.radius.partial_cmp(&y.radius) {
        Some(std::cmp::Ordering::Greater) => true,
        Some(std::cmp::Ordering::Less) => false,
        _ => x.center < y.center,
    };
    if x_big {
        (x, y)
    } else {
        (y, x)
    }
}

pub fn tangency_point(x: &Circle3, y: &Circle3) -> Result<TangencyPoint, GeometryError> {
    let (big, small) = ordered_by_size(x, y);
    let d = [
        small.center[0] - big.center[0],
        small.center[1] - big.center[1],
    ];
    let len = d[0].hypot(d[1]);
    if len == 0.0 {
        return Err(GeometryError::Concentric);
    }
    let u = [d[0] / len, d[1] / len];
    Ok(TangencyPoint {
        point: [
            big.center[0] + big.radius * u[0],
            big.center[1] + big.radius * u[1],
        ],
        normal: u,
    })
}

/// The `2δ × 2√δ` tangency rectangle of a near-tangent pair, centered at the
/// tangency point with its long axis perpendicular to the normal.
pub fn tangency_rect(x: &Circle3, y: &Circle3, delta: f64) -> Result<Rect2, GeometryError> {
    let gap = delta_gap(x, y);
    let tp = tangency_point(x, y)?;
    if gap >= delta {
        return Err(GeometryError::NotNearTangent { gap, delta });
    }
    Ok(Rect2::new(
        tp.point,
        tp.normal_angle() + PI / 2.0,
        2.0 * delta,
        2.0 * delta.sqrt(),
    ))
}

/// Orthonormal frame `(γ, γ′, γ×γ′)/|·|` at angle `theta` on the light cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlankFrame {
    pub theta: f64,
    pub axis_a: Vec3,
    pub axis_b: Vec3,
    pub axis_c: Vec3,
}

impl PlankFrame {
    pub fn axes(&self) -> [Vec3; 3] {
        [self.axis_a, self.axis_b, self.axis_c]
    }

    /// Coordinates of `d` in the frame.
    #[inline]
    pub fn coords(&self, d: &Vec3) -> Vec3 {
        [
            dot3(d, &self.axis_a),
            dot3(d, &self.axis_b),
            dot3(d, &self.axis_c),
        ]
    }

    /// Inverse of [`PlankFrame::coords`].
    #[inline]
    pub fn to_world(&self, c: &Vec3) -> Vec3 {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = c[0] * self.axis_a[i] + c[1] * self.axis_b[i] + c[2] * self.axis_c[i];
        }
        out
    }
}

/// The light-cone frame at `theta`.
///
/// `γ(θ) = (cos θ, sin θ, 1)/√2` has unit length, while `γ′` and `γ×γ′` have
/// length `1/√2`; all three are normalized so plank side lengths are Euclidean.
pub fn plank_axes(theta: f64) -> PlankFrame {
    let theta = wrap_angle(theta);
    let (s, c) = theta.sin_cos();
    let gamma = [c * FRAC_1_SQRT_2, s * FRAC_1_SQRT_2, FRAC_1_SQRT_2];
    let dgamma = [-s * FRAC_1_SQRT_2, c * FRAC_1_SQRT_2, 0.0];
    let normal = cross3(&gamma, &dgamma);
    let unit = |v: Vec3| {
        let n = norm3(&v);
        [v[0] / n, v[1] / n, v[2] / n]
    };
    PlankFrame {
        theta,
        axis_a: gamma,
        axis_b: unit(dgamma),
        axis_c: unit(normal),
    }
}

/// Axis-aligned box in R³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb3 {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb3 {
    pub const fn new(min: Vec3, max: Vec3) -> Self {
        Self { min, max }
    }

    pub const fn cube(lo: f64, hi: f64) -> Self {
        Self::new([lo, lo, lo], [hi, hi, hi])
    }

    /// `[-R,R]² × [R,2R]`.
    pub const fn annular(r: f64) -> Self {
        Self::new([-r, -r, r], [r, r, 2.0 * r])
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    pub fn center(&self) -> Vec3 {
        [
            0.5 * (self.min[0] + self.max[0]),
            0.5 * (self.min[1] + self.max[1]),
            0.5 * (self.min[2] + self.max[2]),
        ]
    }

    pub fn half_extents(&self) -> Vec3 {
        [
            0.5 * (self.max[0] - self.min[0]),
            0.5 * (self.max[1] - self.min[1]),
            0.5 * (self.max[2] - self.min[2]),
        ]
    }

    pub fn volume(&self) -> f64 {
        (0..3).map(|i| self.max[i] - self.min[i]).product()
    }

    /// Separating-axis test against an oriented box given by center, frame and
    /// half-widths along the frame axes.
    pub fn intersects_oriented(&self, center: &Vec3, axes: &[Vec3; 3], half: &Vec3) -> bool {
        let c = self.center();
        let h = self.half_extents();
        let t = sub3(center, &c);
        let world = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let separated_on = |axis: &Vec3| -> bool {
            let len = norm3(axis);
            if len < 1e-12 {
                return false;
            }
            let ra: f64 = (0..3).map(|i| h[i] * axis[i].abs()).sum();
            let rb: f64 = (0..3).map(|i| half[i] * dot3(&axes[i], axis).abs()).sum();
            dot3(&t, axis).abs() > ra + rb
        };
        for w in &world {
            if separated_on(w) {
                return false;
            }
        }
        for a in axes {
            if separated_on(a) {
                return false;
            }
        }
        for w in &world {
            for a in axes {
                if separated_on(&cross3(w, a)) {
                    return false;
                }
            }
        }
        true
    }
}

const CORNER_SLACK: f64 = 1e-12;

/// An `A × √(AB) × B` box aligned with the light-cone frame at `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lightplank {
    pub frame: PlankFrame,
    pub center: Vec3,
    pub a_len: f64,
    pub b_len: f64,
}

impl Lightplank {
    pub fn new(theta: f64, center: Vec3, a_len: f64, b_len: f64) -> Self {
        Self {
            frame: plank_axes(theta),
            center,
            a_len,
            b_len,
        }
    }

    pub fn theta(&self) -> f64 {
        self.frame.theta
    }

    pub fn mid_len(&self) -> f64 {
        (self.a_len * self.b_len).sqrt()
    }

    pub fn half_widths(&self) -> Vec3 {
        [self.a_len / 2.0, self.mid_len() / 2.0, self.b_len / 2.0]
    }

    /// Membership of a point of R³ in the `k`-dilation about the center.
    #[inline]
    pub fn contains_point(&self, p: &Vec3, k: f64) -> bool {
        let c = self.frame.coords(&sub3(p, &self.center));
        let h = self.half_widths();
        c[0].abs() <= k * h[0] && c[1].abs() <= k * h[1] && c[2].abs() <= k * h[2]
    }

    pub fn corners(&self) -> [Vec3; 8] {
        let h = self.half_widths();
        let mut out = [[0.0; 3]; 8];
        for (idx, slot) in out.iter_mut().enumerate() {
            let s = |bit: usize| if idx & (1 << bit) == 0 { -1.0 } else { 1.0 };
            let local = [s(0) * h[0], s(1) * h[1], s(2) * h[2]];
            let w = self.frame.to_world(&local);
            *slot = [
                self.center[0] + w[0],
                self.center[1] + w[1],
                self.center[2] + w[2],
            ];
        }
        out
    }

    /// Whether this plank lies inside the `k`-dilation of `other`.
    ///
    /// Corners are tested with a relative slack of `1e-12` so that a plank is
    /// contained in itself despite rounding in the frame transform.
    pub fn inside_dilation_of(&self, other: &Lightplank, k: f64) -> bool {
        let h = other.half_widths();
        let scale = norm3(&h) + norm3(&other.center);
        self.corners().iter().all(|p| {
            let c = other.frame.coords(&sub3(p, &other.center));
            (0..3).all(|j| c[j].abs() <= k * h[j] + CORNER_SLACK * scale)
        })
    }

    pub fn intersects_box(&self, bbox: &Aabb3) -> bool {
        bbox.intersects_oriented(&self.center, &self.frame.axes(), &self.half_widths())
    }

    pub fn rotated_about_vertical(&self, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        let v = self.center;
        Self::new(
            self.theta() + phi,
            [c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]],
            self.a_len,
            self.b_len,
        )
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            frame: self.frame,
            center: [
                self.center[0] * lambda,
                self.center[1] * lambda,
                self.center[2] * lambda,
            ],
            a_len: self.a_len * lambda,
            b_len: self.b_len * lambda,
        }
    }
}

/// Membership of the lifted circle `x` in the `k`-dilation of `p`.
pub fn plank_contains(p: &Lightplank, x: &Circle3, k: f64) -> bool {
    p.contains_point(&x.point(), k)
}

/// `true` unless the planks are `k`-incomparable, i.e. unless neither lies in
/// the `k`-dilation of the other.
pub fn plank_comparable(p: &Lightplank, q: &Lightplank, k: f64) -> bool {
    p.inside_dilation_of(q, k) || q.inside_dilation_of(p, k)
}

/// Half-extent, along the `a`-axis of a frame at angle `theta + dtheta`, of a
/// plank with half-widths `h` at angle `theta`. Independent of `theta`.
///
/// Containment in a `k`-dilation needs this to be at most `k·h[0]`, which is
/// what makes rows of well-separated angles automatically incomparable.
pub fn rotated_extent(h: &Vec3, dtheta: f64) -> Vec3 {
    let p = plank_axes(0.0);
    let q = plank_axes(dtheta);
    let mut out = [0.0; 3];
    for (j, e) in q.axes().iter().enumerate() {
        out[j] = p
            .axes()
            .iter()
            .zip(h)
            .map(|(f, hw)| hw * dot3(f, e).abs())
            .sum();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn gap_examples() {
        let o = Circle3::new(0.0, 0.0, 1.0);
        assert_eq!(delta_gap(&o, &Circle3::new(1.0, 0.0, 2.0)), 0.0);
        assert_eq!(delta_gap(&o, &Circle3::new(0.0, 0.0, 1.5)), 0.5);
        assert_eq!(
            delta_gap(&Circle3::new(3.0, 4.0, 1.0), &Circle3::new(0.0, 0.0, 2.0)),
            4.0
        );
    }

    #[test]
    fn exact_tangency_examples() {
        let o = IntCircle3::new(0, 0, 1);
        assert!(is_exact_tangent_int(&o, &IntCircle3::new(1, 0, 2)).unwrap());
        assert!(is_exact_tangent_int(&o, &IntCircle3::new(3, 4, 6)).unwrap());
        assert!(!is_exact_tangent_int(&o, &IntCircle3::new(1, 1, 2)).unwrap());
        assert!(!is_exact_tangent_int(&o, &o).unwrap());
    }

    #[test]
    fn exact_tangency_overflow_is_reported() {
        let a = IntCircle3::new(i64::MAX, 0, 1);
        let b = IntCircle3::new(-1, 0, 2);
        assert_eq!(is_exact_tangent_int(&a, &b), Err(GeometryError::Overflow));
        // Differences that fit in i64 square without trouble in i128.
        let c = IntCircle3::new(i64::MAX / 2, 0, 0);
        let d = IntCircle3::new(-(i64::MAX / 2), 0, 1);
        assert_eq!(is_exact_tangent_int(&c, &d), Ok(false));
    }

    #[test]
    fn frame_at_zero_and_quarter_turn() {
        let h = FRAC_1_SQRT_2;
        let f = plank_axes(0.0);
        for (got, want) in [
            (f.axis_a, [h, 0.0, h]),
            (f.axis_b, [0.0, 1.0, 0.0]),
            (f.axis_c, [-h, 0.0, h]),
        ] {
            for i in 0..3 {
                assert_abs_diff_eq!(got[i], want[i], epsilon = 1e-15);
            }
        }
        let f = plank_axes(PI / 2.0);
        for (got, want) in [
            (f.axis_a, [0.0, h, h]),
            (f.axis_b, [-1.0, 0.0, 0.0]),
            (f.axis_c, [0.0, -h, h]),
        ] {
            for i in 0..3 {
                assert_abs_diff_eq!(got[i], want[i], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn theta_is_wrapped() {
        assert_abs_diff_eq!(plank_axes(PI).theta, -PI, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_angle(3.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-15);
        assert!(wrap_angle(-PI) == -PI);
    }

    #[test]
    fn plank_membership_edges() {
        let r = 64.0;
        let p = Lightplank::new(0.3, [1.0, 2.0, 3.0], 1.0, r);
        let v = Circle3::from_point(p.center);
        assert!(plank_contains(&p, &v, 1.0));
        for k in [1.0, 2.0, 7.5] {
            let off = k * 0.5 + 1e-6;
            let a = p.frame.axis_a;
            let x = Circle3::from_point([
                p.center[0] + off * a[0],
                p.center[1] + off * a[1],
                p.center[2] + off * a[2],
            ]);
            assert!(!plank_contains(&p, &x, k));
        }
    }

    #[test]
    fn comparability_examples() {
        let p = Lightplank::new(-1.2, [0.0, 0.0, 10.0], 1.0, 16.0);
        assert!(plank_comparable(&p, &p, 1.0));
        for k in [1.0, 2.0, 4.0] {
            let c = p.frame.axis_c;
            let shift = 10.0 * k * p.b_len;
            let q = Lightplank {
                center: [
                    p.center[0] + shift * c[0],
                    p.center[1] + shift * c[1],
                    p.center[2] + shift * c[2],
                ],
                ..p
            };
            assert!(!plank_comparable(&p, &q, k));
        }
    }

    #[test]
    fn annulus_examples() {
        let x = Circle3::new(0.0, 0.0, 1.0);
        let rect = Rect2::new([1.0, 0.0], PI / 2.0, 1e-4, 1e-2);
        // Corner norms: sqrt((1 ± 5e-5)² + (5e-3)²) lie in (0.9, 1.1).
        for c in rect.corners() {
            let n = c[0].hypot(c[1]);
            assert!(n > 0.9 && n < 1.1);
        }
        assert!(annulus_contains_rect(&x, &rect, 1e-2));
        let at_center = Rect2::new([0.0, 0.0], 0.0, 1e-4, 1e-2);
        assert!(!annulus_contains_rect(&x, &at_center, 0.05));
    }

    #[test]
    fn tangency_rect_examples() {
        let x = Circle3::new(0.0, 0.0, 1.0);
        let y = Circle3::new(1.0, 0.0, 2.0);
        let r = tangency_rect(&x, &y, 0.01).unwrap();
        assert_abs_diff_eq!(r.center[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.center[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.angle, PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.width, 0.02, epsilon = 1e-15);
        assert_abs_diff_eq!(r.length, 0.2, epsilon = 1e-15);
        assert!(annulus_contains_rect(&x, &r, 0.01));
        assert!(annulus_contains_rect(&y, &r, 0.01));

        let z = Circle3::new(0.0, 0.0, 1.5);
        assert_eq!(tangency_rect(&x, &z, 0.01), Err(GeometryError::Concentric));
        match tangency_rect(&x, &Circle3::new(3.0, 4.0, 1.0), 0.01) {
            Err(GeometryError::NotNearTangent { .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn equal_radii_tie_is_deterministic() {
        let a = Circle3::new(0.0, 0.0, 1.0);
        let b = Circle3::new(0.001, 0.0, 1.0);
        let r1 = tangency_rect(&a, &b, 0.01).unwrap();
        let r2 = tangency_rect(&b, &a, 0.01).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn rect_distance() {
        let r = Rect2::new([0.0, 0.0], 0.0, 2.0, 4.0);
        assert_eq!(r.distance_to([0.5, 0.5]), 0.0);
        assert_abs_diff_eq!(r.distance_to([5.0, 0.0]), 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.distance_to([5.0, 5.0]), 5.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.max_distance_to([0.0, 0.0]), 5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn rect_new_swaps_sides() {
        let r = Rect2::new([0.0, 0.0], 0.0, 3.0, 1.0);
        assert_eq!((r.width, r.length), (1.0, 3.0));
        assert_abs_diff_eq!(r.angle, PI / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn box_plank_intersection() {
        let b = Aabb3::cube(0.0, 10.0);
        let inside = Lightplank::new(0.4, [5.0, 5.0, 5.0], 1.0, 4.0);
        assert!(inside.intersects_box(&b));
        let far = Lightplank::new(0.4, [50.0, 5.0, 5.0], 1.0, 4.0);
        assert!(!far.intersects_box(&b));
        // Center outside but the long axis reaches into the box.
        let c = plank_axes(0.0).axis_c;
        let reach = Lightplank::new(
            0.0,
            [5.0 - 6.0 * c[0], 5.0, 5.0 - 6.0 * c[2]],
            1.0,
            100.0,
        );
        assert!(reach.intersects_box(&b));
    }

    #[test]
    fn rotated_extent_matches_corner_projection() {
        let h = [0.5, 4.0, 32.0];
        for dt in [0.0, 0.05, 0.3, 2.0] {
            let e = rotated_extent(&h, dt);
            let p = Lightplank::new(0.2, [0.0; 3], 1.0, 64.0);
            let q = plank_axes(0.2 + dt);
            let max_a = p
                .corners()
                .iter()
                .map(|c| dot3(c, &q.axis_a).abs())
                .fold(0.0, f64::max);
            assert_abs_diff_eq!(e[0], max_a, epsilon = 1e-9);
        }
    }
}

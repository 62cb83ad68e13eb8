//! Planar geometry kernel: points, disks, segments, proxy-circle construction,
//! approximate Alhazen placement and constrained point reoptimization.
//!
//! Everything in here is a pure function. Randomness, where needed, is passed
//! in explicitly.

use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    #[inline]
    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }

    #[inline]
    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    /// Unit vector in the same direction, or the zero vector for a zero input.
    #[inline]
    pub fn unit_or_zero(self) -> Point2 {
        let n = self.norm();
        if n > 0.0 {
            self * (1.0 / n)
        } else {
            Point2::ORIGIN
        }
    }

    #[inline]
    pub fn lerp(self, other: Point2, t: f64) -> Point2 {
        self + (other - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Rotates `self` about `pivot` by `angle` radians (counter-clockwise).
    pub fn rotate_about(self, pivot: Point2, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        let d = self - pivot;
        Point2::new(pivot.x + c * d.x - s * d.y, pivot.y + s * d.x + c * d.y)
    }
}

impl Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    #[inline]
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// A closed disk `{x : |x - center| <= radius}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point2,
    pub radius: f64,
}

impl Circle {
    #[inline]
    pub const fn new(center: Point2, radius: f64) -> Self {
        Circle { center, radius }
    }

    #[inline]
    pub fn contains_point(&self, p: Point2, eps: f64) -> bool {
        self.center.distance(p) <= self.radius + eps
    }

    /// Disk containment: every point of `other` lies in `self`.
    #[inline]
    pub fn contains_circle(&self, other: &Circle, eps: f64) -> bool {
        self.center.distance(other.center) + other.radius <= self.radius + eps
    }

    /// Point of the disk closest to `p` (`p` itself when inside).
    pub fn closest_point(&self, p: Point2) -> Point2 {
        let d = p - self.center;
        let n = d.norm();
        if n <= self.radius {
            p
        } else {
            self.center + d * (self.radius / n)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    #[inline]
    pub const fn new(a: Point2, b: Point2) -> Self {
        Segment { a, b }
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    /// Parameter in `[0, 1]` of the point of the segment closest to `q`.
    pub fn project_param(&self, q: Point2) -> f64 {
        let d = self.b - self.a;
        let len2 = d.norm2();
        if len2 == 0.0 {
            return 0.0;
        }
        ((q - self.a).dot(d) / len2).clamp(0.0, 1.0)
    }

    pub fn closest_point(&self, q: Point2) -> Point2 {
        self.a.lerp(self.b, self.project_param(q))
    }
}

/// Euclidean distance from `q` to the closed segment.
pub fn segment_point_distance(seg: &Segment, q: Point2) -> f64 {
    seg.closest_point(q).distance(q)
}

/// Gap between the boundaries of two disks. Negative when they overlap.
#[inline]
pub fn effective_distance(c1: &Circle, c2: &Circle) -> f64 {
    c1.center.distance(c2.center) - c1.radius - c2.radius
}

/// Builds the single circle that stands in for a merged pair.
///
/// * one disk inside the other: the smaller disk is returned unchanged;
/// * disjoint disks: a radius-0 circle halfway between the facing boundary
///   points;
/// * overlapping disks: a circle centred halfway between the two boundary
///   points on the centre line, with radius drawn uniformly between the
///   overlap depth and the half chord.
pub fn proxy_circle<R: Rng + ?Sized>(c1: &Circle, c2: &Circle, rng: &mut R) -> Circle {
    let (small, big) = if c1.radius <= c2.radius { (c1, c2) } else { (c2, c1) };
    let d = c1.center.distance(c2.center);
    if d + small.radius <= big.radius {
        return *small;
    }

    let (r1, r2) = (c1.radius, c2.radius);
    let u = (c2.center - c1.center) * (1.0 / d);
    // Midpoint of p1 + r1*u and p2 - r2*u.
    let center = (c1.center + c2.center + u * (r1 - r2)) * 0.5;
    if d >= r1 + r2 {
        return Circle::new(center, 0.0);
    }

    let delta = 0.5 * (r1 + r2 - d);
    let a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    let h = (r1 * r1 - a * a).max(0.0).sqrt();
    let (lo, hi) = if delta <= h { (delta, h) } else { (h, delta) };
    let radius = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
    Circle::new(center, radius)
}

/// Added length `|AP| + |PB| - |AB|` of detouring through `p`.
#[inline]
pub fn delta_len(a: Point2, b: Point2, p: Point2) -> f64 {
    a.distance(p) + p.distance(b) - a.distance(b)
}

/// Gradient of [`delta_len`] with respect to `p`. A unit term is dropped when
/// `p` coincides with the corresponding endpoint.
#[inline]
pub fn delta_len_gradient(a: Point2, b: Point2, p: Point2) -> Point2 {
    (p - a).unit_or_zero() + (p - b).unit_or_zero()
}

/// Approximate solution of Alhazen's problem for inserting a point of `circle`
/// into segment `seg`.
///
/// Returns the chosen point and the added length. If the segment meets the
/// disk the point lies on the segment and the added length is zero.
/// Otherwise the point is where the bisector of the angle AOB leaves the disk.
pub fn alhazen_bisection(seg: &Segment, circle: &Circle) -> (Point2, f64) {
    let o = circle.center;
    let r = circle.radius;
    let q = seg.closest_point(o);
    if q.distance(o) <= r {
        return (q, 0.0);
    }
    if seg.is_degenerate() {
        let p = circle.closest_point(seg.a);
        return (p, 2.0 * seg.a.distance(p));
    }

    let u = (seg.a - o).unit_or_zero();
    let v = (seg.b - o).unit_or_zero();
    let mut w = u + v;
    if w.norm() < 1e-12 {
        // A and B on opposite rays through O; the segment passes (almost)
        // through the centre.
        w = q - o;
    }
    let p = o + w.unit_or_zero() * r;
    let delta = delta_len(seg.a, seg.b, p).max(0.0);
    (p, delta)
}

/// One guarded Newton step on the boundary angle, minimizing `|AP| + |PB|`.
///
/// `p0` is expected on the boundary of `circle`. Returns `p0` unchanged when
/// the step is undefined or would not decrease the path length.
pub fn newton_refine(seg: &Segment, circle: &Circle, p0: Point2) -> Point2 {
    let r = circle.radius;
    if r <= 0.0 {
        return p0;
    }
    let o = circle.center;
    let theta0 = (p0.y - o.y).atan2(p0.x - o.x);
    let (d1, d2) = boundary_derivatives(seg, o, r, theta0);
    if d2.is_nan() || d2 <= 0.0 || !d1.is_finite() {
        return p0;
    }
    let step = d1 / d2;
    if step == 0.0 || !step.is_finite() {
        return p0;
    }
    let theta1 = theta0 - step;
    let p1 = o + Point2::new(theta1.cos(), theta1.sin()) * r;
    let before = seg.a.distance(p0) + p0.distance(seg.b);
    let after = seg.a.distance(p1) + p1.distance(seg.b);
    if after <= before {
        p1
    } else {
        p0
    }
}

/// First and second derivative of `|A P(θ)| + |B P(θ)|` where
/// `P(θ) = o + r (cos θ, sin θ)`.
fn boundary_derivatives(seg: &Segment, o: Point2, r: f64, theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    let p = o + Point2::new(c, s) * r;
    let dp = Point2::new(-s, c) * r;
    let ddp = Point2::new(-c, -s) * r;
    let mut first = 0.0;
    let mut second = 0.0;
    for e in [seg.a, seg.b] {
        let d = p - e;
        let n = d.norm();
        if n < 1e-300 {
            continue;
        }
        let ddot = d.dot(dp);
        first += ddot / n;
        second += (dp.norm2() + d.dot(ddp)) / n - ddot * ddot / (n * n * n);
    }
    (first, second)
}

/// Moves tour point `p` (between neighbours `a` and `b`) inside the common
/// intersection of `disks` to reduce [`delta_len`].
///
/// If AB crosses the common intersection, the returned point lies on AB.
/// Otherwise a single step is taken against the gradient, as far as the disks
/// allow, halving the step until the added length does not grow.
pub fn reoptimize_point(a: Point2, b: Point2, p: Point2, disks: &[Circle]) -> Point2 {
    if let Some(q) = segment_common_point(a, b, p, disks) {
        return q;
    }

    let g = delta_len_gradient(a, b, p);
    let gn = g.norm();
    if gn < 1e-12 {
        return p;
    }
    let dir = g * (1.0 / gn);

    let mut t = f64::INFINITY;
    for disk in disks {
        let w = p - disk.center;
        let gw = dir.dot(w);
        let c = w.norm2() - disk.radius * disk.radius;
        let root = gw + (gw * gw - c).max(0.0).sqrt();
        t = t.min(root.max(0.0));
    }
    if !t.is_finite() || t <= 0.0 {
        return p;
    }

    let base = delta_len(a, b, p);
    for _ in 0..48 {
        let q = p - dir * t;
        if delta_len(a, b, q) <= base {
            return q;
        }
        t *= 0.5;
    }
    p
}

/// A point of segment AB lying in every disk, choosing the one closest to the
/// projection of `p` onto AB.
fn segment_common_point(a: Point2, b: Point2, p: Point2, disks: &[Circle]) -> Option<Point2> {
    let dir = b - a;
    let len2 = dir.norm2();
    if len2 == 0.0 {
        return disks
            .iter()
            .all(|d| d.center.distance(a) <= d.radius)
            .then_some(a);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for disk in disks {
        let ac = a - disk.center;
        let half_b = dir.dot(ac);
        let c = ac.norm2() - disk.radius * disk.radius;
        let disc = half_b * half_b - len2 * c;
        if disc < 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        lo = lo.max((-half_b - sq) / len2);
        hi = hi.min((-half_b + sq) / len2);
        if lo > hi {
            return None;
        }
    }
    let t = Segment::new(a, b).project_param(p).clamp(lo, hi);
    Some(a + dir * t)
}

pub fn centroid(points: impl IntoIterator<Item = Point2>) -> Option<Point2> {
    let mut sum = Point2::ORIGIN;
    let mut n = 0usize;
    for p in points {
        sum = sum + p;
        n += 1;
    }
    (n > 0).then(|| sum * (1.0 / n as f64))
}

/// Rotates every centre about the centroid of all centres. Radii are kept.
pub fn rotate_instance(circles: &[Circle], angle: f64) -> Vec<Circle> {
    let Some(pivot) = centroid(circles.iter().map(|c| c.center)) else {
        return Vec::new();
    };
    circles
        .iter()
        .map(|c| Circle::new(c.center.rotate_about(pivot, angle), c.radius))
        .collect()
}

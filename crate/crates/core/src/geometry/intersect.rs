use super::mesh::Triangle3;
use super::GeometryError;
use crate::point::Point3;

/// Parametric margin at both segment ends; contacts closer to an endpoint
/// than this are not blockage.
pub const T_EPS: f64 = 1e-9;
/// Barycentric slack so edges shared by two triangles are never missed.
pub const BARY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment3 {
    pub a: Point3,
    pub b: Point3,
}

impl Segment3 {
    pub fn new(a: Point3, b: Point3) -> Result<Self, GeometryError> {
        if a == b {
            return Err(GeometryError::DegenerateSegment);
        }
        Ok(Self { a, b })
    }

    pub fn direction(&self) -> Point3 {
        self.b - self.a
    }

    pub fn at(&self, t: f64) -> Point3 {
        self.a.lerp(self.b, t)
    }
}

/// Möller–Trumbore test restricted to the open segment.
///
/// Returns true iff the segment crosses the triangle at a parameter
/// `t ∈ (T_EPS, 1 − T_EPS)` with barycentrics `u, v ≥ −BARY_EPS` and
/// `u + v ≤ 1 + BARY_EPS`. Segments parallel to the triangle plane never hit.
pub fn segment_intersects_triangle(seg: &Segment3, tri: &Triangle3) -> bool {
    let dir = seg.direction();
    let e1 = tri.v1 - tri.v0;
    let e2 = tri.v2 - tri.v0;
    let p = dir.cross(e2);
    let det = e1.dot(p);
    let scale = dir.norm() * e1.norm() * e2.norm();
    if det.abs() <= 1e-12 * scale {
        return false;
    }
    let inv = 1.0 / det;
    let s = seg.a - tri.v0;
    let u = s.dot(p) * inv;
    if !(-BARY_EPS..=1.0 + BARY_EPS).contains(&u) {
        return false;
    }
    let q = s.cross(e1);
    let v = dir.dot(q) * inv;
    if v < -BARY_EPS || u + v > 1.0 + BARY_EPS {
        return false;
    }
    let t = e2.dot(q) * inv;
    t > T_EPS && t < 1.0 - T_EPS
}

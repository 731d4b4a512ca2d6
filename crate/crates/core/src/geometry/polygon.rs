//! Planar polygon predicates on footprints given as ordered `[x, y]` corners.

use super::GeometryError;

pub type Point2 = [f64; 2];

/// Distance below which a point counts as lying on a polygon edge.
pub const BOUNDARY_EPS: f64 = 1e-9;

const CROSS_EPS: f64 = 1e-12;

fn sub(a: Point2, b: Point2) -> Point2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross(a: Point2, b: Point2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// z-component of `(b - a) x (c - a)`; positive for a counter-clockwise turn.
pub fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    cross(sub(b, a), sub(c, a))
}

/// Shoelace area, positive for counter-clockwise winding.
pub fn signed_area(poly: &[Point2]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| cross(poly[i], poly[(i + 1) % n]))
        .sum::<f64>()
        * 0.5
}

fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = sub(b, a);
    let ap = sub(p, a);
    let len_sq = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len_sq > 0.0 {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len_sq).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let d = [ap[0] - t * ab[0], ap[1] - t * ab[1]];
    (d[0] * d[0] + d[1] * d[1]).sqrt()
}

/// Even-odd containment test. Points within [`BOUNDARY_EPS`] of an edge are
/// reported inside, which is the conservative answer for blockage.
pub fn point_in_polygon(p: Point2, poly: &[Point2]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[j], poly[i]);
        if point_segment_distance(p, a, b) <= BOUNDARY_EPS {
            return true;
        }
        if (b[1] > p[1]) != (a[1] > p[1]) {
            let x_cross = b[0] + (p[1] - b[1]) * (a[0] - b[0]) / (a[1] - b[1]);
            if p[0] < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Inside and farther than [`BOUNDARY_EPS`] from every edge.
pub fn point_strictly_inside(p: Point2, poly: &[Point2]) -> bool {
    let n = poly.len();
    point_in_polygon(p, poly)
        && (0..n).all(|i| point_segment_distance(p, poly[i], poly[(i + 1) % n]) > BOUNDARY_EPS)
}

fn on_segment(p: Point2, a: Point2, b: Point2) -> bool {
    p[0] >= a[0].min(b[0]) - CROSS_EPS
        && p[0] <= a[0].max(b[0]) + CROSS_EPS
        && p[1] >= a[1].min(b[1]) - CROSS_EPS
        && p[1] <= a[1].max(b[1]) + CROSS_EPS
}

/// Closed-segment intersection test, touching counts.
pub fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > CROSS_EPS && d2 < -CROSS_EPS) || (d1 < -CROSS_EPS && d2 > CROSS_EPS))
        && ((d3 > CROSS_EPS && d4 < -CROSS_EPS) || (d3 < -CROSS_EPS && d4 > CROSS_EPS))
    {
        return true;
    }
    (d1.abs() <= CROSS_EPS && on_segment(a, c, d))
        || (d2.abs() <= CROSS_EPS && on_segment(b, c, d))
        || (d3.abs() <= CROSS_EPS && on_segment(c, a, b))
        || (d4.abs() <= CROSS_EPS && on_segment(d, a, b))
}

/// Checks that the closed polyline has no repeated corners, no zero-length or
/// folded-back edges, and no crossings between non-adjacent edges.
pub fn check_simple(poly: &[Point2]) -> Result<(), GeometryError> {
    let n = poly.len();
    if n < 3 {
        return Err(GeometryError::TooFewCorners(n));
    }
    if poly.iter().any(|p| !(p[0].is_finite() && p[1].is_finite())) {
        return Err(GeometryError::NonFinite);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if poly[i] == poly[j] {
                return Err(GeometryError::SelfIntersecting);
            }
        }
    }
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let c = poly[(i + 2) % n];
        // Adjacent edges may only share their common corner.
        let ab = sub(b, a);
        let bc = sub(c, b);
        if cross(ab, bc).abs() <= CROSS_EPS && ab[0] * bc[0] + ab[1] * bc[1] < 0.0 {
            return Err(GeometryError::SelfIntersecting);
        }
        for j in (i + 2)..n {
            if (j + 1) % n == i {
                continue;
            }
            if segments_intersect(a, b, poly[j], poly[(j + 1) % n]) {
                return Err(GeometryError::SelfIntersecting);
            }
        }
    }
    if signed_area(poly).abs() <= CROSS_EPS {
        return Err(GeometryError::DegenerateFootprint);
    }
    Ok(())
}

/// True when every corner turns the same way with a non-zero turn.
pub fn is_strictly_convex(poly: &[Point2]) -> bool {
    let n = poly.len();
    let sign = signed_area(poly).signum();
    (0..n).all(|i| orient(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]) * sign > CROSS_EPS)
}

fn in_triangle_closed(p: Point2, a: Point2, b: Point2, c: Point2) -> bool {
    orient(a, b, p) >= -CROSS_EPS && orient(b, c, p) >= -CROSS_EPS && orient(c, a, p) >= -CROSS_EPS
}

/// Triangulates a simple polygon, returning index triples wound the same way
/// as the input. Strictly convex inputs get a fan from corner 0, everything
/// else goes through ear clipping.
pub fn triangulate_polygon(poly: &[Point2]) -> Result<Vec<[usize; 3]>, GeometryError> {
    let n = poly.len();
    if n < 3 {
        return Err(GeometryError::TooFewCorners(n));
    }
    if is_strictly_convex(poly) {
        return Ok((1..n - 1).map(|i| [0, i, i + 1]).collect());
    }
    let ccw = signed_area(poly) > 0.0;
    // Work counter-clockwise, flip the triples back at the end.
    let mut ring: Vec<usize> = if ccw { (0..n).collect() } else { (0..n).rev().collect() };
    let mut tris = Vec::with_capacity(n - 2);
    while ring.len() > 3 {
        let m = ring.len();
        let ear = (0..m).find(|&k| {
            let (ip, ic, inx) = (ring[(k + m - 1) % m], ring[k], ring[(k + 1) % m]);
            let (a, b, c) = (poly[ip], poly[ic], poly[inx]);
            if orient(a, b, c) <= CROSS_EPS {
                return false;
            }
            ring.iter().all(|&q| {
                q == ip || q == ic || q == inx || !in_triangle_closed(poly[q], a, b, c)
            })
        });
        let Some(k) = ear else {
            return Err(GeometryError::DegenerateFootprint);
        };
        tris.push([ring[(k + m - 1) % m], ring[k], ring[(k + 1) % m]]);
        ring.remove(k);
    }
    if orient(poly[ring[0]], poly[ring[1]], poly[ring[2]]) <= CROSS_EPS {
        return Err(GeometryError::DegenerateFootprint);
    }
    tris.push([ring[0], ring[1], ring[2]]);
    if !ccw {
        for t in &mut tris {
            t.swap(1, 2);
        }
    }
    Ok(tris)
}

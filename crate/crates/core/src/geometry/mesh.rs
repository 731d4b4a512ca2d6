use serde::{Deserialize, Serialize};

use super::polygon::{check_simple, triangulate_polygon, Point2};
use super::GeometryError;
use crate::point::Point3;

/// Triangles with area at or below this are treated as degenerate.
pub const AREA_EPS: f64 = 1e-12;

/// A building: simple footprint on the ground plane extruded to `height`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonPrism {
    pub bottom_corners: Vec<Point2>,
    pub height: f64,
}

impl PolygonPrism {
    pub fn new(bottom_corners: Vec<Point2>, height: f64) -> Result<Self, GeometryError> {
        let prism = Self { bottom_corners, height };
        prism.validate()?;
        Ok(prism)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !self.height.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        if self.height <= 0.0 {
            return Err(GeometryError::NonPositiveHeight(self.height));
        }
        check_simple(&self.bottom_corners)
    }

    pub fn bottom_corners_3d(&self) -> impl Iterator<Item = Point3> + '_ {
        self.bottom_corners.iter().map(|c| Point3::new(c[0], c[1], 0.0))
    }

    /// Roof corners, the footprint translated up by `height`.
    pub fn top_corners(&self) -> impl Iterator<Item = Point3> + '_ {
        self.bottom_corners
            .iter()
            .map(move |c| Point3::new(c[0], c[1], self.height))
    }

    /// Axis-aligned footprint box as `(min, max)`.
    pub fn footprint_bbox(&self) -> (Point2, Point2) {
        self.bottom_corners.iter().fold(
            ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]),
            |(lo, hi), c| {
                (
                    [lo[0].min(c[0]), lo[1].min(c[1])],
                    [hi[0].max(c[0]), hi[1].max(c[1])],
                )
            },
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle3 {
    pub v0: Point3,
    pub v1: Point3,
    pub v2: Point3,
}

impl Triangle3 {
    pub fn new(v0: Point3, v1: Point3, v2: Point3) -> Result<Self, GeometryError> {
        let t = Self { v0, v1, v2 };
        if t.area() <= AREA_EPS {
            return Err(GeometryError::DegenerateTriangle);
        }
        Ok(t)
    }

    pub fn area(&self) -> f64 {
        0.5 * (self.v1 - self.v0).cross(self.v2 - self.v0).norm()
    }
}

/// Closed triangle surface of one prism.
///
/// Vertices `0..n` are the bottom corners and `n..2n` their roof translates;
/// `faces` indexes into that list and `triangles` holds the same faces with
/// coordinates resolved.
#[derive(Debug, Clone)]
pub struct PrismMesh {
    pub source: PolygonPrism,
    pub vertices: Vec<Point3>,
    pub faces: Vec<[usize; 3]>,
    pub triangles: Vec<Triangle3>,
    pub(crate) bbox_min: Point2,
    pub(crate) bbox_max: Point2,
}

impl PrismMesh {
    pub fn height(&self) -> f64 {
        self.source.height
    }
}

/// Builds the watertight surface: two triangles per wall, cap triangulation on
/// the roof and the mirrored triangulation on the floor.
pub fn triangulate(prism: &PolygonPrism) -> Result<PrismMesh, GeometryError> {
    prism.validate()?;
    let n = prism.bottom_corners.len();
    let cap = triangulate_polygon(&prism.bottom_corners)?;

    let vertices: Vec<Point3> = prism.bottom_corners_3d().chain(prism.top_corners()).collect();
    let mut faces = Vec::with_capacity(2 * n + 2 * cap.len());
    for i in 0..n {
        let j = (i + 1) % n;
        faces.push([i, j, n + j]);
        faces.push([i, n + j, n + i]);
    }
    for t in &cap {
        faces.push([n + t[0], n + t[1], n + t[2]]);
        faces.push([t[0], t[2], t[1]]);
    }
    let triangles = faces
        .iter()
        .map(|f| Triangle3::new(vertices[f[0]], vertices[f[1]], vertices[f[2]]))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| GeometryError::DegenerateFootprint)?;
    let (bbox_min, bbox_max) = prism.footprint_bbox();
    Ok(PrismMesh { source: prism.clone(), vertices, faces, triangles, bbox_min, bbox_max })
}

pub fn triangulate_all(prisms: &[PolygonPrism]) -> Result<Vec<PrismMesh>, GeometryError> {
    prisms.iter().map(triangulate).collect()
}

//! Geometry kernel: prism meshes, segment/triangle crossing and the
//! line-of-sight predicate.

mod intersect;
mod los;
mod mesh;
pub mod polygon;

use thiserror::Error;

pub use intersect::{segment_intersects_triangle, Segment3, BARY_EPS, T_EPS};
pub use los::{blocking_prisms, has_los, has_los_exhaustive};
pub use mesh::{triangulate, triangulate_all, PolygonPrism, PrismMesh, Triangle3, AREA_EPS};
pub use polygon::{point_in_polygon, Point2};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("footprint needs at least 3 corners, got {0}")]
    TooFewCorners(usize),
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("height must be positive, got {0}")]
    NonPositiveHeight(f64),
    #[error("footprint is self-intersecting")]
    SelfIntersecting,
    #[error("footprint is degenerate (collinear corners)")]
    DegenerateFootprint,
    #[error("triangle has zero area")]
    DegenerateTriangle,
    #[error("segment endpoints coincide")]
    DegenerateSegment,
}

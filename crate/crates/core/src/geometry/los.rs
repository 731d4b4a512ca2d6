//! Line-of-sight between a UAV position and a ground user.
//!
//! A cheap broad phase discards prisms the segment cannot touch: the 2D
//! segment is clipped against the (slightly inflated) footprint box and, over
//! the clipped span, the segment's lowest point is compared with the roof.
//! Only surviving prisms are tested triangle by triangle.
//!
//! A segment that crosses no surface is either wholly outside a solid or
//! wholly inside it (both endpoints on or within the boundary); the midpoint
//! tells which.

use super::intersect::{segment_intersects_triangle, Segment3};
use super::mesh::PrismMesh;
use super::polygon::point_strictly_inside;
use crate::point::Point3;

/// Inflation of broad-phase boxes, well above the narrow-phase slack.
const BROAD_MARGIN: f64 = 1e-6;

/// Parameter span `[t0, t1]` over which the segment's ground projection lies
/// inside the box, or `None` (Liang–Barsky).
fn clip_to_box(seg: &Segment3, lo: [f64; 2], hi: [f64; 2]) -> Option<(f64, f64)> {
    let d = seg.direction();
    let (mut t0, mut t1) = (0.0_f64, 1.0_f64);
    for (p, dp, lo, hi) in [(seg.a.x, d.x, lo[0], hi[0]), (seg.a.y, d.y, lo[1], hi[1])] {
        if dp == 0.0 {
            if p < lo || p > hi {
                return None;
            }
            continue;
        }
        let (mut ta, mut tb) = ((lo - p) / dp, (hi - p) / dp);
        if ta > tb {
            std::mem::swap(&mut ta, &mut tb);
        }
        t0 = t0.max(ta);
        t1 = t1.min(tb);
        if t0 > t1 {
            return None;
        }
    }
    Some((t0, t1))
}

fn may_block(seg: &Segment3, mesh: &PrismMesh) -> bool {
    let lo = [mesh.bbox_min[0] - BROAD_MARGIN, mesh.bbox_min[1] - BROAD_MARGIN];
    let hi = [mesh.bbox_max[0] + BROAD_MARGIN, mesh.bbox_max[1] + BROAD_MARGIN];
    let Some((t0, t1)) = clip_to_box(seg, lo, hi) else {
        return false;
    };
    let z_low = seg.at(t0).z.min(seg.at(t1).z);
    z_low <= mesh.height() + BROAD_MARGIN
}

/// Strictly inside the solid, away from floor, roof and walls.
fn in_interior(p: Point3, mesh: &PrismMesh) -> bool {
    p.z > INTERIOR_EPS
        && p.z < mesh.height() - INTERIOR_EPS
        && point_strictly_inside(p.xy(), &mesh.source.bottom_corners)
}

const INTERIOR_EPS: f64 = 1e-9;

fn narrow_blocks(seg: &Segment3, mesh: &PrismMesh) -> bool {
    mesh.triangles.iter().any(|t| segment_intersects_triangle(seg, t))
        || in_interior(seg.at(0.5), mesh)
}

fn mesh_blocks(seg: &Segment3, mesh: &PrismMesh) -> bool {
    may_block(seg, mesh) && narrow_blocks(seg, mesh)
}

/// True iff no prism surface crosses the open segment between `uav` and `ue`
/// and the segment does not run through a prism's interior.
/// Coincident endpoints have nothing in between and count as visible.
pub fn has_los(uav: Point3, ue: Point3, meshes: &[PrismMesh]) -> bool {
    let Ok(seg) = Segment3::new(uav, ue) else {
        return true;
    };
    !meshes.iter().any(|m| mesh_blocks(&seg, m))
}

/// Indices (into `meshes`) of every prism that blocks the segment.
pub fn blocking_prisms(uav: Point3, ue: Point3, meshes: &[PrismMesh]) -> Vec<usize> {
    let Ok(seg) = Segment3::new(uav, ue) else {
        return Vec::new();
    };
    meshes
        .iter()
        .enumerate()
        .filter(|(_, m)| mesh_blocks(&seg, m))
        .map(|(i, _)| i)
        .collect()
}

/// Narrow phase only; used to check that the broad phase never changes an
/// answer.
pub fn has_los_exhaustive(uav: Point3, ue: Point3, meshes: &[PrismMesh]) -> bool {
    let Ok(seg) = Segment3::new(uav, ue) else {
        return true;
    };
    !meshes.iter().any(|m| narrow_blocks(&seg, m))
}

//! Rotated-box IoU in bird's-eye view and full 3D.

use super::box3d::{box_corners_bev, Box3D};
use super::polygon::convex_polygon_intersection_area;
use super::GeometryError;

fn check_frames(a: &Box3D, b: &Box3D) -> Result<(), GeometryError> {
    if a.frame() != b.frame() {
        return Err(GeometryError::FrameMismatch {
            expected: a.frame(),
            got: b.frame(),
        });
    }
    Ok(())
}

/// Footprint areas and their clipped overlap, all through the same shoelace
/// route so identical boxes divide to exactly 1.
fn bev_overlap_parts(a: &Box3D, b: &Box3D) -> Result<(f64, f64, f64), GeometryError> {
    let corners_a = box_corners_bev(a);
    let corners_b = box_corners_bev(b);
    let area_a = super::polygon::signed_area(&corners_a);
    let area_b = super::polygon::signed_area(&corners_b);
    let inter = convex_polygon_intersection_area(&corners_a, &corners_b)?
        .min(area_a)
        .min(area_b);
    Ok((area_a, area_b, inter))
}

/// Ground-plane IoU of two boxes' footprints; vertical placement is ignored.
pub fn iou_bev(a: &Box3D, b: &Box3D) -> Result<f64, GeometryError> {
    check_frames(a, b)?;
    let (area_a, area_b, inter) = bev_overlap_parts(a, b)?;
    let union = area_a + area_b - inter;
    Ok((inter / union).clamp(0.0, 1.0))
}

/// Volumetric IoU: BEV overlap times the overlap of the vertical extents.
pub fn iou_3d(a: &Box3D, b: &Box3D) -> Result<f64, GeometryError> {
    check_frames(a, b)?;
    let (area_a, area_b, bev_inter) = bev_overlap_parts(a, b)?;
    let (bot_a, top_a) = a.vertical_interval();
    let (bot_b, top_b) = b.vertical_interval();
    let vertical = (top_a.min(top_b) - bot_a.max(bot_b)).max(0.0);
    let inter = bev_inter * vertical;
    // Heights through the same interval arithmetic keep self-IoU exactly 1.
    let union = area_a * (top_a - bot_a) + area_b * (top_b - bot_b) - inter;
    Ok((inter / union).clamp(0.0, 1.0))
}

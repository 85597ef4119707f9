//! Coordinate frames, transforms, oriented 3D boxes, and rotated-box IoU.
//!
//! All geometry is computed in f64; point-cloud storage stays f32 to match
//! the `.bin` format.

mod box3d;
mod iou;
mod polygon;
mod transform;

pub use box3d::{box_cam_to_velo, box_corners_bev, box_velo_to_cam, normalize_angle, Box3D};
pub use iou::{iou_3d, iou_bev};
pub use polygon::convex_polygon_intersection_area;
pub use transform::{
    cam_to_velo, cam_to_velo_transform, project_to_image, unproject, velo_to_cam,
    velo_to_cam_transform, RigidTransform,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Coordinate frame a cloud or box lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Frame {
    /// Rectified camera frame: x right, y down, z forward.
    Camera,
    /// KITTI Velodyne frame: x forward, y left, z up.
    Velodyne,
}

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("depth must be positive, got {depth}")]
    NonPositiveDepth { depth: f64 },
    #[error("calibration transform is singular")]
    SingularTransform,
    #[error("frame mismatch: expected {expected:?}, got {got:?}")]
    FrameMismatch { expected: Frame, got: Frame },
    #[error("degenerate polygon")]
    DegeneratePolygon,
    #[error("invalid box: {0}")]
    InvalidBox(String),
}

/// One pseudo-LiDAR point: position plus the intensity feature channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudPoint {
    pub x: f32,
    pub y: f32,
    pub z: f32,
    pub intensity: f32,
}

impl CloudPoint {
    pub fn new(x: f32, y: f32, z: f32, intensity: f32) -> Self {
        Self { x, y, z, intensity }
    }

    pub fn position(&self) -> nalgebra::Point3<f64> {
        nalgebra::Point3::new(self.x as f64, self.y as f64, self.z as f64)
    }
}

/// An N x (x, y, z, intensity) point cloud tagged with its frame.
///
/// Clouds built by this crate keep every intensity in [0, 1] and every
/// coordinate finite; the type itself is immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    frame: Frame,
    points: Vec<CloudPoint>,
}

impl PointCloud {
    pub fn from_points(frame: Frame, points: Vec<CloudPoint>) -> Self {
        Self { frame, points }
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn points(&self) -> &[CloudPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Cloud containing the points at `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        Self {
            frame: self.frame,
            points: indices.iter().map(|&i| self.points[i]).collect(),
        }
    }
}

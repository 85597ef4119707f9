//! Oriented 3D boxes and the conversions between the two frame conventions.
//!
//! The vertical anchor differs per frame, matching KITTI usage:
//! camera-frame boxes anchor at the bottom-face center (the label
//! `location`, +y pointing down), Velodyne-frame boxes at the volume center
//! (+z pointing up). Conversion between the conventions is explicit.

use nalgebra::{Point3, Vector3};

use crate::kitti_io::Calibration;

use super::transform::{cam_to_velo_transform, velo_to_cam_transform};
use super::{Frame, GeometryError};

/// An oriented 3D box: center, `(length, width, height)` extents, and yaw
/// about the frame's vertical axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box3D {
    frame: Frame,
    center: Point3<f64>,
    /// (length, width, height), meters.
    dims: (f64, f64, f64),
    yaw: f64,
}

/// Wraps an angle to `(-pi, pi]`.
pub fn normalize_angle(a: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut r = a % two_pi;
    if r <= -std::f64::consts::PI {
        r += two_pi;
    } else if r > std::f64::consts::PI {
        r -= two_pi;
    }
    r
}

impl Box3D {
    pub fn new(
        frame: Frame,
        center: (f64, f64, f64),
        dims: (f64, f64, f64),
        yaw: f64,
    ) -> Result<Self, GeometryError> {
        let (l, w, h) = dims;
        if !(l > 0.0 && w > 0.0 && h > 0.0) {
            return Err(GeometryError::InvalidBox(format!(
                "dimensions must be strictly positive, got ({l}, {w}, {h})"
            )));
        }
        let finite = [center.0, center.1, center.2, l, w, h, yaw]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(GeometryError::InvalidBox("non-finite field".into()));
        }
        Ok(Self {
            frame,
            center: Point3::new(center.0, center.1, center.2),
            dims,
            yaw: normalize_angle(yaw),
        })
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn center(&self) -> Point3<f64> {
        self.center
    }

    pub fn length(&self) -> f64 {
        self.dims.0
    }

    pub fn width(&self) -> f64 {
        self.dims.1
    }

    pub fn height(&self) -> f64 {
        self.dims.2
    }

    pub fn dims(&self) -> (f64, f64, f64) {
        self.dims
    }

    pub fn yaw(&self) -> f64 {
        self.yaw
    }

    pub fn bev_area(&self) -> f64 {
        self.dims.0 * self.dims.1
    }

    pub fn volume(&self) -> f64 {
        self.dims.0 * self.dims.1 * self.dims.2
    }

    /// Ground-plane center in the frame's BEV parameterization.
    pub fn bev_center(&self) -> [f64; 2] {
        match self.frame {
            Frame::Camera => [self.center.x, self.center.z],
            Frame::Velodyne => [self.center.x, self.center.y],
        }
    }

    /// Yaw expressed as a CCW angle in the BEV plane used by
    /// [`box_corners_bev`]. Camera rotation_y spins the opposite way in the
    /// (x, z) plane.
    pub fn bev_angle(&self) -> f64 {
        match self.frame {
            Frame::Camera => -self.yaw,
            Frame::Velodyne => self.yaw,
        }
    }

    /// Vertical extent as `(bottom, top)` along an axis that points up.
    pub fn vertical_interval(&self) -> (f64, f64) {
        match self.frame {
            // y points down; the bottom face sits at center.y.
            Frame::Camera => (-self.center.y, -self.center.y + self.dims.2),
            Frame::Velodyne => (
                self.center.z - self.dims.2 / 2.0,
                self.center.z + self.dims.2 / 2.0,
            ),
        }
    }
}

/// The four ground-plane corners of a box, counter-clockwise.
pub fn box_corners_bev(b: &Box3D) -> [[f64; 2]; 4] {
    let [cu, cv] = b.bev_center();
    let (l, w, _) = b.dims();
    let (sin, cos) = b.bev_angle().sin_cos();
    let base = [
        (l / 2.0, w / 2.0),
        (-l / 2.0, w / 2.0),
        (-l / 2.0, -w / 2.0),
        (l / 2.0, -w / 2.0),
    ];
    base.map(|(u, v)| [cu + u * cos - v * sin, cv + u * sin + v * cos])
}

/// Converts a Velodyne-frame box (volume-center anchor) to a camera-frame
/// box (bottom-face-center anchor, KITTI label convention).
///
/// The yaw carries over through the rotation of the length axis projected
/// onto the target ground plane, which assumes the calibration keeps the
/// vertical axes of the two frames aligned (true for KITTI rigs).
pub fn box_velo_to_cam(b: &Box3D, calib: &Calibration) -> Result<Box3D, GeometryError> {
    if b.frame() != Frame::Velodyne {
        return Err(GeometryError::FrameMismatch {
            expected: Frame::Velodyne,
            got: b.frame(),
        });
    }
    let xform = velo_to_cam_transform(calib);
    let center_cam = xform.apply(&b.center());
    let bottom_center = (center_cam.x, center_cam.y + b.height() / 2.0, center_cam.z);
    let dir = xform.rotate(&Vector3::new(b.yaw().cos(), b.yaw().sin(), 0.0));
    // Camera length axis at rotation_y is (cos ry, 0, -sin ry).
    let ry = (-dir.z).atan2(dir.x);
    Box3D::new(Frame::Camera, bottom_center, b.dims(), ry)
}

/// Inverse of [`box_velo_to_cam`].
pub fn box_cam_to_velo(b: &Box3D, calib: &Calibration) -> Result<Box3D, GeometryError> {
    if b.frame() != Frame::Camera {
        return Err(GeometryError::FrameMismatch {
            expected: Frame::Camera,
            got: b.frame(),
        });
    }
    let xform = cam_to_velo_transform(calib)?;
    let volume_center_cam = Point3::new(b.center().x, b.center().y - b.height() / 2.0, b.center().z);
    let center_velo = xform.apply(&volume_center_cam);
    let dir = xform.rotate(&Vector3::new(b.yaw().cos(), 0.0, -b.yaw().sin()));
    let yaw = dir.y.atan2(dir.x);
    Box3D::new(
        Frame::Velodyne,
        (center_velo.x, center_velo.y, center_velo.z),
        b.dims(),
        yaw,
    )
}

//! Unprojection and the camera/Velodyne coordinate transforms.

use nalgebra::{Matrix3, Point3, Vector3};

use crate::kitti_io::Calibration;

use super::{CloudPoint, Frame, GeometryError, PointCloud};

/// A rigid map `p -> R p + t`.
#[derive(Debug, Clone, Copy)]
pub struct RigidTransform {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl RigidTransform {
    pub fn apply(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::from(self.rotation * p.coords + self.translation)
    }

    /// Rotates a direction vector, ignoring the translation.
    pub fn rotate(&self, d: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * d
    }
}

/// Back-projects pixel `(u, v)` at metric `depth` into the rectified camera
/// frame: `X = (u - cx) Z / fx`, `Y = (v - cy) Z / fy`, `Z = depth`.
pub fn unproject(
    u: f64,
    v: f64,
    depth: f64,
    calib: &Calibration,
) -> Result<Point3<f64>, GeometryError> {
    if depth <= 0.0 {
        return Err(GeometryError::NonPositiveDepth { depth });
    }
    Ok(Point3::new(
        (u - calib.cx) * depth / calib.fx,
        (v - calib.cy) * depth / calib.fy,
        depth,
    ))
}

/// Projects a rectified-camera point to pixel coordinates.
pub fn project_to_image(
    p_cam: &Point3<f64>,
    calib: &Calibration,
) -> Result<(f64, f64), GeometryError> {
    if p_cam.z <= 0.0 {
        return Err(GeometryError::NonPositiveDepth { depth: p_cam.z });
    }
    Ok((
        calib.fx * p_cam.x / p_cam.z + calib.cx,
        calib.fy * p_cam.y / p_cam.z + calib.cy,
    ))
}

/// The forward map Velodyne -> rectified camera: `p_rect = R0 (R_vc p + t_vc)`.
pub fn velo_to_cam_transform(calib: &Calibration) -> RigidTransform {
    RigidTransform {
        rotation: calib.r0_rect * calib.velo_rotation(),
        translation: calib.r0_rect * calib.velo_translation(),
    }
}

/// The exact inverse of [`velo_to_cam_transform`].
pub fn cam_to_velo_transform(calib: &Calibration) -> Result<RigidTransform, GeometryError> {
    let forward = velo_to_cam_transform(calib);
    let inv = forward
        .rotation
        .try_inverse()
        .ok_or(GeometryError::SingularTransform)?;
    Ok(RigidTransform {
        rotation: inv,
        translation: -(inv * forward.translation),
    })
}

fn map_cloud(cloud: &PointCloud, xform: &RigidTransform, out_frame: Frame) -> PointCloud {
    let points = cloud
        .points()
        .iter()
        .map(|p| {
            let q = xform.apply(&p.position());
            CloudPoint::new(q.x as f32, q.y as f32, q.z as f32, p.intensity)
        })
        .collect();
    PointCloud::from_points(out_frame, points)
}

/// Transforms a Velodyne-frame cloud into the rectified camera frame.
pub fn velo_to_cam(cloud: &PointCloud, calib: &Calibration) -> Result<PointCloud, GeometryError> {
    if cloud.frame() != Frame::Velodyne {
        return Err(GeometryError::FrameMismatch {
            expected: Frame::Velodyne,
            got: cloud.frame(),
        });
    }
    Ok(map_cloud(cloud, &velo_to_cam_transform(calib), Frame::Camera))
}

/// Transforms a rectified-camera cloud into the Velodyne frame. Mutual
/// inverse of [`velo_to_cam`].
pub fn cam_to_velo(cloud: &PointCloud, calib: &Calibration) -> Result<PointCloud, GeometryError> {
    if cloud.frame() != Frame::Camera {
        return Err(GeometryError::FrameMismatch {
            expected: Frame::Camera,
            got: cloud.frame(),
        });
    }
    Ok(map_cloud(cloud, &cam_to_velo_transform(calib)?, Frame::Velodyne))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kitti_io::parse_calibration;
    use nalgebra::{Matrix3x4, Point3};

    fn identity_calib() -> Calibration {
        parse_calibration(
            "P2: 100 0 0 0 0 100 0 0 0 0 1 0\n\
             R0_rect: 1 0 0 0 1 0 0 0 1\n\
             Tr_velo_to_cam: 1 0 0 0 0 1 0 0 0 0 1 0\n",
        )
        .unwrap()
    }

    #[test]
    fn principal_point_maps_to_optical_axis() {
        let calib = parse_calibration(
            "P2: 700 0 600 0 0 700 180 0 0 0 1 0\n\
             R0_rect: 1 0 0 0 1 0 0 0 1\n\
             Tr_velo_to_cam: 1 0 0 0 0 1 0 0 0 0 1 0\n",
        )
        .unwrap();
        let p = unproject(600.0, 180.0, 10.0, &calib).unwrap();
        assert_eq!((p.x, p.y, p.z), (0.0, 0.0, 10.0));
    }

    #[test]
    fn unproject_hand_case() {
        let calib = identity_calib(); // fx = fy = 100, cx = cy = 0
        let p = unproject(50.0, -50.0, 2.0, &calib).unwrap();
        assert_eq!((p.x, p.y, p.z), (1.0, -1.0, 2.0));
    }

    #[test]
    fn zero_depth_rejected() {
        let calib = identity_calib();
        assert!(matches!(
            unproject(10.0, 10.0, 0.0, &calib),
            Err(GeometryError::NonPositiveDepth { .. })
        ));
    }

    #[test]
    fn identity_extrinsics_leave_coordinates_unchanged() {
        let calib = identity_calib();
        let cloud = PointCloud::from_points(
            Frame::Camera,
            vec![CloudPoint::new(1.0, -2.0, 3.0, 0.25)],
        );
        let velo = cam_to_velo(&cloud, &calib).unwrap();
        assert_eq!(velo.points()[0], CloudPoint::new(1.0, -2.0, 3.0, 0.25));
        assert_eq!(velo.frame(), Frame::Velodyne);
    }

    #[test]
    fn translation_only_hand_inversion() {
        // t_vc = (0, 0, -0.27): forward adds the offset, the inverse removes it.
        let calib = Calibration::new(
            Matrix3x4::from_row_slice(&[100.0, 0.0, 0.0, 0.0, 0.0, 100.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
            Matrix3::identity(),
            Matrix3x4::from_row_slice(&[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, -0.27]),
        )
        .unwrap();
        let xform = cam_to_velo_transform(&calib).unwrap();
        let p = xform.apply(&Point3::new(0.0, 0.0, 10.0));
        assert!((p.z - 10.27).abs() < 1e-12);
        assert!(p.x.abs() < 1e-12 && p.y.abs() < 1e-12);
    }

    #[test]
    fn wrong_frame_rejected() {
        let calib = identity_calib();
        let cloud = PointCloud::from_points(Frame::Velodyne, vec![]);
        assert!(matches!(
            cam_to_velo(&cloud, &calib),
            Err(GeometryError::FrameMismatch { .. })
        ));
    }
}

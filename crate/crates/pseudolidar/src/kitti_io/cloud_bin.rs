//! KITTI-style point cloud `.bin` files: contiguous little-endian f32
//! quadruples `(x, y, z, intensity)`.

use crate::geometry::{CloudPoint, Frame, PointCloud};

use super::FormatError;

/// Serializes a cloud to the `.bin` layout. The frame tag is not stored;
/// files written by this pipeline are always in Velodyne coordinates.
pub fn write_pointcloud_bin(cloud: &PointCloud) -> Vec<u8> {
    let mut out = Vec::with_capacity(cloud.len() * 16);
    for p in cloud.points() {
        out.extend_from_slice(&p.x.to_le_bytes());
        out.extend_from_slice(&p.y.to_le_bytes());
        out.extend_from_slice(&p.z.to_le_bytes());
        out.extend_from_slice(&p.intensity.to_le_bytes());
    }
    out
}

/// Reads a `.bin` point cloud, tagging it with the Velodyne frame.
pub fn read_pointcloud_bin(bytes: &[u8]) -> Result<PointCloud, FormatError> {
    if bytes.len() % 16 != 0 {
        return Err(FormatError::TruncatedFile { len: bytes.len() });
    }
    let points = bytes
        .chunks_exact(16)
        .map(|chunk| {
            let f = |i: usize| f32::from_le_bytes(chunk[i * 4..i * 4 + 4].try_into().unwrap());
            CloudPoint::new(f(0), f(1), f(2), f(3))
        })
        .collect();
    Ok(PointCloud::from_points(Frame::Velodyne, points))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_round_trip() {
        let cloud = PointCloud::from_points(
            Frame::Velodyne,
            vec![CloudPoint::new(1.0, 2.0, 3.0, 0.5)],
        );
        let bytes = write_pointcloud_bin(&cloud);
        assert_eq!(bytes.len(), 16);
        assert_eq!(read_pointcloud_bin(&bytes).unwrap(), cloud);
    }

    #[test]
    fn empty_cloud_is_zero_bytes() {
        let cloud = PointCloud::from_points(Frame::Velodyne, vec![]);
        let bytes = write_pointcloud_bin(&cloud);
        assert!(bytes.is_empty());
        assert_eq!(read_pointcloud_bin(&bytes).unwrap().len(), 0);
    }

    #[test]
    fn truncated_file_rejected() {
        assert!(matches!(
            read_pointcloud_bin(&[0u8; 17]),
            Err(FormatError::TruncatedFile { len: 17 })
        ));
    }

    #[test]
    fn large_cloud_round_trips_bit_exactly() {
        // Deterministic pseudo-random f32 patterns, including denormals.
        let points: Vec<CloudPoint> = (0..16_384u32)
            .map(|i| {
                let x = f32::from_bits(0x3f80_0000 ^ i.wrapping_mul(2654435761));
                let x = if x.is_finite() { x } else { 1.0 };
                CloudPoint::new(x, -x * 0.5, x * 0.25, (i % 100) as f32 / 100.0)
            })
            .collect();
        let cloud = PointCloud::from_points(Frame::Velodyne, points);
        let back = read_pointcloud_bin(&write_pointcloud_bin(&cloud)).unwrap();
        assert_eq!(back, cloud);
        for (a, b) in cloud.points().iter().zip(back.points()) {
            assert_eq!(a.x.to_bits(), b.x.to_bits());
            assert_eq!(a.intensity.to_bits(), b.intensity.to_bits());
        }
    }
}

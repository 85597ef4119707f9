//! Heuristic frustum-based 3D box fitting from ground-truth 2D boxes: the
//! non-learning baseline. Frustum points are clustered, a cluster is picked,
//! yaw comes from the principal axis of the ground-plane spread, extents
//! from per-class size priors, and the vertical pose from a robust bottom
//! percentile.

mod clustering;
mod yaw;

pub use clustering::{cluster_and_select, dbscan};
pub use yaw::{pca_yaw, YawEstimate};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    box_velo_to_cam, normalize_angle, velo_to_cam_transform, Box3D, Frame, GeometryError,
    PointCloud,
};
use crate::kitti_io::{BBox2D, Calibration, ClassName, LabelRecord};

#[derive(Debug, Error)]
pub enum FitterError {
    #[error("no samples for class {0}")]
    NoSamplesForClass(ClassName),
    #[error("unknown class {0} (no size prior)")]
    UnknownClass(ClassName),
    #[error("cluster is empty")]
    EmptyCluster,
    #[error("expected a {expected:?}-frame cloud, got {got:?}")]
    WrongFrame { expected: Frame, got: Frame },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Mean box extents of a class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSize {
    pub length: f64,
    pub width: f64,
    pub height: f64,
}

/// Per-class mean dimensions with the sample counts they were computed from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SizePriors {
    classes: BTreeMap<ClassName, (PriorSize, usize)>,
}

impl SizePriors {
    /// Arithmetic per-class mean of (h, w, l) over all non-DontCare labels.
    pub fn from_labels<'a>(labels: impl IntoIterator<Item = &'a LabelRecord>) -> Self {
        let mut sums: BTreeMap<ClassName, (f64, f64, f64, usize)> = BTreeMap::new();
        for label in labels {
            if label.class_name == ClassName::DontCare {
                continue;
            }
            let (h, w, l) = label.dims;
            let entry = sums.entry(label.class_name).or_insert((0.0, 0.0, 0.0, 0));
            entry.0 += l;
            entry.1 += w;
            entry.2 += h;
            entry.3 += 1;
        }
        let classes = sums
            .into_iter()
            .map(|(class, (l, w, h, n))| {
                let size = PriorSize {
                    length: l / n as f64,
                    width: w / n as f64,
                    height: h / n as f64,
                };
                (class, (size, n))
            })
            .collect();
        Self { classes }
    }

    /// Like [`SizePriors::from_labels`] but fails if any requested class has
    /// no samples.
    pub fn from_labels_for_classes<'a>(
        labels: impl IntoIterator<Item = &'a LabelRecord>,
        required: &[ClassName],
    ) -> Result<Self, FitterError> {
        let priors = Self::from_labels(labels);
        for class in required {
            if !priors.classes.contains_key(class) {
                return Err(FitterError::NoSamplesForClass(*class));
            }
        }
        Ok(priors)
    }

    pub fn get(&self, class: ClassName) -> Option<PriorSize> {
        self.classes.get(&class).map(|(size, _)| *size)
    }

    pub fn sample_count(&self, class: ClassName) -> usize {
        self.classes.get(&class).map_or(0, |(_, n)| *n)
    }

    pub fn classes(&self) -> impl Iterator<Item = ClassName> + '_ {
        self.classes.keys().copied()
    }
}

/// Which cluster represents the object when several form in the frustum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterSelection {
    /// The cluster with the most points.
    LargestCluster,
    /// The cluster whose median forward distance is closest to the median
    /// forward distance of the whole frustum. Frustums often contain
    /// background structure larger than the object itself.
    NearestMedianDepth,
}

/// Parameters of the frustum fitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitterConfig {
    /// Density-clustering neighborhood radius, meters.
    pub cluster_epsilon: f64,
    /// Core-point threshold (neighbors within epsilon, self included).
    pub cluster_min_points: usize,
    /// Frustums with fewer points yield no detection.
    pub min_frustum_points: usize,
    pub cluster_selection: ClusterSelection,
}

impl Default for FitterConfig {
    fn default() -> Self {
        Self {
            cluster_epsilon: 0.5,
            cluster_min_points: 10,
            min_frustum_points: 10,
            cluster_selection: ClusterSelection::NearestMedianDepth,
        }
    }
}

/// Clusters whose principal-axis eigenvalue ratio falls below this are
/// treated as isotropic; their yaw falls back to the viewing-ray direction.
pub const YAW_ISOTROPY_RATIO: f64 = 1.2;

/// Points of a Velodyne cloud whose image projection lands inside `bbox`
/// (inclusive edges) with positive camera depth. Degenerate boxes select
/// nothing. Callers pass boxes already clipped to the image.
pub fn frustum_points(
    cloud: &PointCloud,
    bbox: &BBox2D,
    calib: &Calibration,
) -> Result<PointCloud, FitterError> {
    if cloud.frame() != Frame::Velodyne {
        return Err(FitterError::WrongFrame {
            expected: Frame::Velodyne,
            got: cloud.frame(),
        });
    }
    if bbox.right <= bbox.left || bbox.bottom <= bbox.top {
        return Ok(PointCloud::from_points(Frame::Velodyne, Vec::new()));
    }
    let to_cam = velo_to_cam_transform(calib);
    let keep: Vec<usize> = cloud
        .points()
        .iter()
        .enumerate()
        .filter(|(_, p)| {
            let q = to_cam.apply(&p.position());
            if q.z <= 0.0 {
                return false;
            }
            let u = calib.fx * q.x / q.z + calib.cx;
            let v = calib.fy * q.y / q.z + calib.cy;
            u >= bbox.left && u <= bbox.right && v >= bbox.top && v <= bbox.bottom
        })
        .map(|(i, _)| i)
        .collect();
    Ok(cloud.select(&keep))
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Forward distance of a point: x in the Velodyne frame, z in the camera
/// frame.
fn forward_coord(frame: Frame, p: &crate::geometry::CloudPoint) -> f64 {
    match frame {
        Frame::Velodyne => p.x as f64,
        Frame::Camera => p.z as f64,
    }
}

pub(crate) fn median_forward(cloud: &PointCloud) -> f64 {
    let mut values: Vec<f64> = cloud
        .points()
        .iter()
        .map(|p| forward_coord(cloud.frame(), p))
        .collect();
    median(&mut values)
}

/// Linear-interpolated percentile (`q` in [0, 1]) of a sorted copy of `values`.
fn percentile(values: &[f64], q: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
    }
}

/// Fits a Velodyne-frame box to a cluster: extents from the class prior, the
/// given yaw, ground-plane center at the cluster centroid, and the box
/// bottom at the 5th percentile of cluster z (robust to below-ground bleed).
pub fn fit_box(
    cluster: &PointCloud,
    class: ClassName,
    priors: &SizePriors,
    yaw: f64,
) -> Result<Box3D, FitterError> {
    if cluster.is_empty() {
        return Err(FitterError::EmptyCluster);
    }
    if cluster.frame() != Frame::Velodyne {
        return Err(FitterError::WrongFrame {
            expected: Frame::Velodyne,
            got: cluster.frame(),
        });
    }
    let prior = priors.get(class).ok_or(FitterError::UnknownClass(class))?;
    let n = cluster.len() as f64;
    let cx = cluster.points().iter().map(|p| p.x as f64).sum::<f64>() / n;
    let cy = cluster.points().iter().map(|p| p.y as f64).sum::<f64>() / n;
    let zs: Vec<f64> = cluster.points().iter().map(|p| p.z as f64).collect();
    let bottom = percentile(&zs, 0.05);
    Ok(Box3D::new(
        Frame::Velodyne,
        (cx, cy, bottom + prior.height / 2.0),
        (prior.length, prior.width, prior.height),
        yaw,
    )?)
}

/// Runs the whole heuristic baseline for one frame: one fitted detection per
/// ground-truth 2D box whose frustum yields a cluster, serialized in camera
/// coordinates with a depth-ranked score.
pub fn exp0_detect(
    cloud: &PointCloud,
    gt_labels: &[LabelRecord],
    calib: &Calibration,
    priors: &SizePriors,
    cfg: &FitterConfig,
) -> Result<Vec<LabelRecord>, FitterError> {
    let mut detections = Vec::new();
    for gt in gt_labels {
        if gt.class_name == ClassName::DontCare || priors.get(gt.class_name).is_none() {
            continue;
        }
        let frustum = frustum_points(cloud, &gt.bbox2d, calib)?;
        let Some(cluster) = cluster_and_select(&frustum, cfg) else {
            continue;
        };

        let ground: Vec<[f64; 2]> = cluster
            .points()
            .iter()
            .map(|p| [p.x as f64, p.y as f64])
            .collect();
        let estimate = pca_yaw(&ground);
        let yaw = if estimate.degenerate || estimate.anisotropy < YAW_ISOTROPY_RATIO {
            // Near-isotropic spread: align with the ray from the sensor.
            let cx = ground.iter().map(|g| g[0]).sum::<f64>() / ground.len() as f64;
            let cy = ground.iter().map(|g| g[1]).sum::<f64>() / ground.len() as f64;
            yaw::fold_to_half_circle(cy.atan2(cx))
        } else {
            estimate.yaw
        };

        let box_velo = fit_box(&cluster, gt.class_name, priors, yaw)?;
        let box_cam = box_velo_to_cam(&box_velo, calib)?;
        let median_depth = median_forward(&cluster);
        let score = 1.0 / (1.0 + median_depth.max(0.0));

        let (l, w, h) = box_cam.dims();
        let center = box_cam.center();
        let rotation_y = box_cam.yaw();
        detections.push(LabelRecord {
            class_name: gt.class_name,
            truncation: 0.0,
            occlusion: 0,
            alpha: normalize_angle(rotation_y - center.x.atan2(center.z)),
            bbox2d: gt.bbox2d,
            dims: (h, w, l),
            location: (center.x, center.y, center.z),
            rotation_y,
            score: Some(score),
        });
    }
    Ok(detections)
}

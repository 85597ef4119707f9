//! Pseudo-LiDAR point cloud construction from dense depth maps.
//!
//! A depth raster is filtered to the valid range, back-projected through the
//! camera intrinsics, moved into the Velodyne frame, given an intensity
//! channel (grayscale, mask confidence, or zero), and sampled to a fixed
//! point budget. Each experimental variant is a [`VariantConfig`].

mod confidence;
mod sampling;

pub use confidence::{build_confidence_map, BinaryMask};
pub use sampling::{mask_guided_select, sample_to_budget};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    cam_to_velo_transform, unproject, CloudPoint, Frame, GeometryError, PointCloud,
};
use crate::kitti_io::{Calibration, RasterKind, ScalarRaster};

#[derive(Debug, Error)]
pub enum CloudError {
    #[error("raster size mismatch: depth {depth_w}x{depth_h}, feature {feat_w}x{feat_h}")]
    RasterSizeMismatch {
        depth_w: usize,
        depth_h: usize,
        feat_w: usize,
        feat_h: usize,
    },
    #[error("variant requires a {required:?} feature raster")]
    MissingFeatureRaster { required: RasterKind },
    #[error("feature raster kind mismatch: expected {expected:?}, got {got:?}")]
    WrongFeatureKind {
        expected: RasterKind,
        got: RasterKind,
    },
    #[error("no valid depth pixels in range")]
    EmptyCloud,
    #[error("confidence length {conf} does not match point count {points}")]
    LengthMismatch { points: usize, conf: usize },
    #[error("invalid variant config: {0}")]
    InvalidConfig(String),
    #[error("instance score {0} outside [0, 1]")]
    ScoreOutOfRange(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// What fills the 4th (intensity) channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelMode {
    /// BT.601 grayscale of the RGB image.
    Grayscale,
    /// Per-pixel instance-mask confidence.
    MaskConfidence,
    /// Constant zero (geometry-only control).
    Zero,
}

/// How points are selected before the budget is enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// Keep the whole filtered scene.
    FullScene,
    /// Keep all foreground (confidence above threshold), fill the remaining
    /// budget with uniformly sampled background.
    MaskGuided,
}

/// Configuration of one pseudo-LiDAR variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariantConfig {
    pub channel_mode: ChannelMode,
    pub sampling_mode: SamplingMode,
    /// Exact output point count.
    pub num_points: usize,
    /// Strict lower depth bound, meters.
    pub depth_min: f64,
    /// Strict upper depth bound, meters.
    pub depth_max: f64,
    /// Foreground cutoff for mask-guided sampling.
    pub mask_threshold: f64,
    /// Seed for all stochastic sampling in this build.
    pub seed: u64,
}

impl VariantConfig {
    /// Full-scene cloud with grayscale intensity, 16,384 points.
    pub fn exp2(seed: u64) -> Self {
        Self {
            channel_mode: ChannelMode::Grayscale,
            sampling_mode: SamplingMode::FullScene,
            num_points: 16_384,
            depth_min: 1.0,
            depth_max: 60.0,
            mask_threshold: 0.5,
            seed,
        }
    }

    /// Full-scene cloud with mask-confidence intensity, 16,384 points.
    pub fn exp4(seed: u64) -> Self {
        Self {
            channel_mode: ChannelMode::MaskConfidence,
            ..Self::exp2(seed)
        }
    }

    /// Mask-guided sampling with mask-confidence intensity, 40,000 points.
    pub fn exp5(seed: u64) -> Self {
        Self {
            channel_mode: ChannelMode::MaskConfidence,
            sampling_mode: SamplingMode::MaskGuided,
            num_points: 40_000,
            ..Self::exp2(seed)
        }
    }

    /// Full-scene cloud with zero intensity (geometry-only control).
    pub fn exp7(seed: u64) -> Self {
        Self {
            channel_mode: ChannelMode::Zero,
            ..Self::exp2(seed)
        }
    }

    pub fn validate(&self) -> Result<(), CloudError> {
        if self.num_points == 0 {
            return Err(CloudError::InvalidConfig("num_points must be positive".into()));
        }
        if !(self.depth_min < self.depth_max) {
            return Err(CloudError::InvalidConfig(format!(
                "depth_min {} must be below depth_max {}",
                self.depth_min, self.depth_max
            )));
        }
        if !(0.0..=1.0).contains(&self.mask_threshold) {
            return Err(CloudError::InvalidConfig(format!(
                "mask_threshold {} outside [0, 1]",
                self.mask_threshold
            )));
        }
        if self.channel_mode == ChannelMode::Grayscale
            && self.sampling_mode == SamplingMode::MaskGuided
        {
            return Err(CloudError::InvalidConfig(
                "grayscale intensity with mask-guided sampling would need two feature rasters"
                    .into(),
            ));
        }
        Ok(())
    }

    /// Raster kind the intensity channel reads from, if any.
    fn intensity_kind(&self) -> Option<RasterKind> {
        match self.channel_mode {
            ChannelMode::Grayscale => Some(RasterKind::Grayscale01),
            ChannelMode::MaskConfidence => Some(RasterKind::Confidence01),
            ChannelMode::Zero => None,
        }
    }

    /// Raster kind required overall (intensity source and/or sampling guide).
    fn required_feature(&self) -> Option<RasterKind> {
        match self.sampling_mode {
            SamplingMode::MaskGuided => Some(RasterKind::Confidence01),
            SamplingMode::FullScene => self.intensity_kind(),
        }
    }
}

/// Filter statistics recorded while building a cloud.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BuildStats {
    pub pixels_total: usize,
    /// Pixels passing the strict depth-range filter.
    pub pixels_valid: usize,
    pub output_points: usize,
}

/// Per-frame manifest line emitted next to the `.bin` outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameManifest {
    pub frame_id: String,
    pub variant: String,
    pub seed: u64,
    pub pixels_total: usize,
    pub pixels_valid: usize,
    pub output_points: usize,
}

/// Builds a pseudo-LiDAR cloud from a depth raster and an optional feature
/// raster, in the Velodyne frame, with exactly `cfg.num_points` points.
pub fn build_pseudolidar(
    depth: &ScalarRaster,
    feature: Option<&ScalarRaster>,
    calib: &Calibration,
    cfg: &VariantConfig,
) -> Result<PointCloud, CloudError> {
    build_pseudolidar_with_stats(depth, feature, calib, cfg).map(|(cloud, _)| cloud)
}

/// [`build_pseudolidar`] plus the filter statistics for the manifest.
pub fn build_pseudolidar_with_stats(
    depth: &ScalarRaster,
    feature: Option<&ScalarRaster>,
    calib: &Calibration,
    cfg: &VariantConfig,
) -> Result<(PointCloud, BuildStats), CloudError> {
    cfg.validate()?;
    if depth.kind() != RasterKind::DepthMeters {
        return Err(CloudError::WrongFeatureKind {
            expected: RasterKind::DepthMeters,
            got: depth.kind(),
        });
    }
    if let Some(required) = cfg.required_feature() {
        let feat = feature.ok_or(CloudError::MissingFeatureRaster { required })?;
        if feat.kind() != required {
            return Err(CloudError::WrongFeatureKind {
                expected: required,
                got: feat.kind(),
            });
        }
        if feat.width() != depth.width() || feat.height() != depth.height() {
            return Err(CloudError::RasterSizeMismatch {
                depth_w: depth.width(),
                depth_h: depth.height(),
                feat_w: feat.width(),
                feat_h: feat.height(),
            });
        }
    }

    let to_velo = cam_to_velo_transform(calib)?;
    let mut points = Vec::new();
    let mut conf = Vec::new();
    for v in 0..depth.height() {
        for u in 0..depth.width() {
            let d = depth.get(u, v) as f64;
            if !(d > cfg.depth_min && d < cfg.depth_max) {
                continue;
            }
            let p_cam = unproject(u as f64, v as f64, d, calib)?;
            let p = to_velo.apply(&p_cam);
            let intensity = match cfg.channel_mode {
                ChannelMode::Zero => 0.0,
                _ => feature.expect("checked above").get(u, v).clamp(0.0, 1.0),
            };
            points.push(CloudPoint::new(p.x as f32, p.y as f32, p.z as f32, intensity));
            if cfg.sampling_mode == SamplingMode::MaskGuided {
                conf.push(feature.expect("checked above").get(u, v));
            }
        }
    }
    let pixels_valid = points.len();
    if points.is_empty() {
        return Err(CloudError::EmptyCloud);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cloud = PointCloud::from_points(Frame::Velodyne, points);
    let cloud = match cfg.sampling_mode {
        SamplingMode::FullScene => cloud,
        SamplingMode::MaskGuided => sampling::mask_guided_select_with_rng(
            &cloud,
            &conf,
            cfg.num_points,
            cfg.mask_threshold,
            &mut rng,
        )?,
    };
    let cloud = sampling::sample_to_budget_with_rng(&cloud, cfg.num_points, &mut rng)?;

    let stats = BuildStats {
        pixels_total: depth.width() * depth.height(),
        pixels_valid,
        output_points: cloud.len(),
    };
    Ok((cloud, stats))
}

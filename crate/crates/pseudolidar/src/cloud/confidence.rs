//! Per-pixel confidence maps built from instance masks.

use crate::kitti_io::{RasterKind, ScalarRaster};

use super::CloudError;

/// A binary instance mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self, CloudError> {
        if bits.len() != width * height {
            return Err(CloudError::InvalidConfig(format!(
                "mask has {} bits for {width}x{height}",
                bits.len()
            )));
        }
        Ok(Self { width, height, bits })
    }

    pub fn get(&self, u: usize, v: usize) -> bool {
        self.bits[v * self.width + u]
    }
}

/// Merges scored instance masks into one confidence raster: each pixel takes
/// the maximum score over the instances covering it, background stays 0.
pub fn build_confidence_map(
    width: usize,
    height: usize,
    instances: &[(BinaryMask, f64)],
) -> Result<ScalarRaster, CloudError> {
    let mut values = vec![0.0f32; width * height];
    for (mask, score) in instances {
        if mask.width != width || mask.height != height {
            return Err(CloudError::RasterSizeMismatch {
                depth_w: width,
                depth_h: height,
                feat_w: mask.width,
                feat_h: mask.height,
            });
        }
        if !(0.0..=1.0).contains(score) {
            return Err(CloudError::ScoreOutOfRange(*score));
        }
        let score = *score as f32;
        for (value, &inside) in values.iter_mut().zip(&mask.bits) {
            if inside && score > *value {
                *value = score;
            }
        }
    }
    ScalarRaster::new(width, height, RasterKind::Confidence01, values)
        .map_err(|e| CloudError::InvalidConfig(e.to_string()))
}

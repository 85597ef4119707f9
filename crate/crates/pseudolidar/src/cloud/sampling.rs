//! Seeded point-budget sampling.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::PointCloud;

use super::CloudError;

/// Resizes a cloud to exactly `n` points: uniform subsampling without
/// replacement when above budget, duplication by sampling with replacement
/// when below, identity (original order preserved) when equal.
pub fn sample_to_budget(cloud: &PointCloud, n: usize, seed: u64) -> Result<PointCloud, CloudError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_to_budget_with_rng(cloud, n, &mut rng)
}

pub(super) fn sample_to_budget_with_rng<R: Rng>(
    cloud: &PointCloud,
    n: usize,
    rng: &mut R,
) -> Result<PointCloud, CloudError> {
    if cloud.is_empty() {
        return Err(CloudError::EmptyCloud);
    }
    let len = cloud.len();
    if len == n {
        return Ok(cloud.clone());
    }
    if len > n {
        let mut keep = index::sample(rng, len, n).into_vec();
        keep.sort_unstable();
        return Ok(cloud.select(&keep));
    }
    let mut indices: Vec<usize> = (0..len).collect();
    indices.extend((len..n).map(|_| rng.random_range(0..len)));
    Ok(cloud.select(&indices))
}

/// Splits points into foreground (`conf > threshold`) and background, keeps
/// all foreground, and fills the remaining budget with uniformly sampled
/// background. Foreground alone above the budget is itself subsampled and
/// background dropped. The output never exceeds `cfg.num_points` but may be
/// smaller when the input is; the caller tops up via [`sample_to_budget`].
pub fn mask_guided_select(
    cloud: &PointCloud,
    conf: &[f32],
    cfg: &super::VariantConfig,
) -> Result<PointCloud, CloudError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    mask_guided_select_with_rng(cloud, conf, cfg.num_points, cfg.mask_threshold, &mut rng)
}

pub(super) fn mask_guided_select_with_rng<R: Rng>(
    cloud: &PointCloud,
    conf: &[f32],
    budget: usize,
    threshold: f64,
    rng: &mut R,
) -> Result<PointCloud, CloudError> {
    if conf.len() != cloud.len() {
        return Err(CloudError::LengthMismatch {
            points: cloud.len(),
            conf: conf.len(),
        });
    }
    let (fg, bg): (Vec<usize>, Vec<usize>) =
        (0..cloud.len()).partition(|&i| conf[i] as f64 > threshold);

    if fg.len() >= budget {
        let mut keep: Vec<usize> = index::sample(rng, fg.len(), budget)
            .into_iter()
            .map(|i| fg[i])
            .collect();
        keep.sort_unstable();
        return Ok(cloud.select(&keep));
    }

    let wanted_bg = (budget - fg.len()).min(bg.len());
    let mut keep_bg: Vec<usize> = index::sample(rng, bg.len(), wanted_bg)
        .into_iter()
        .map(|i| bg[i])
        .collect();
    keep_bg.sort_unstable();
    let mut keep = fg;
    keep.extend(keep_bg);
    Ok(cloud.select(&keep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::{ChannelMode, SamplingMode, VariantConfig};
    use crate::geometry::{CloudPoint, Frame};

    fn cloud_of(n: usize) -> PointCloud {
        PointCloud::from_points(
            Frame::Velodyne,
            (0..n)
                .map(|i| CloudPoint::new(i as f32, 0.0, 0.0, 0.0))
                .collect(),
        )
    }

    fn cfg(budget: usize, threshold: f64) -> VariantConfig {
        VariantConfig {
            channel_mode: ChannelMode::MaskConfidence,
            sampling_mode: SamplingMode::MaskGuided,
            num_points: budget,
            depth_min: 1.0,
            depth_max: 60.0,
            mask_threshold: threshold,
            seed: 11,
        }
    }

    #[test]
    fn budget_equal_is_identity_in_order() {
        let cloud = cloud_of(10);
        let out = sample_to_budget(&cloud, 10, 3).unwrap();
        assert_eq!(out, cloud);
    }

    #[test]
    fn padding_only_duplicates_members() {
        let cloud = cloud_of(5);
        let out = sample_to_budget(&cloud, 8, 3).unwrap();
        assert_eq!(out.len(), 8);
        for p in out.points() {
            assert!(cloud.points().contains(p));
        }
        // The original points all survive in front.
        assert_eq!(&out.points()[..5], cloud.points());
    }

    #[test]
    fn subsample_is_deterministic() {
        let cloud = cloud_of(100_000);
        let a = sample_to_budget(&cloud, 16_384, 42).unwrap();
        let b = sample_to_budget(&cloud, 16_384, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 16_384);
        let c = sample_to_budget(&cloud, 16_384, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn empty_cloud_rejected() {
        assert!(matches!(
            sample_to_budget(&cloud_of(0), 4, 0),
            Err(CloudError::EmptyCloud)
        ));
    }

    #[test]
    fn all_background_degenerates_to_uniform() {
        let cloud = cloud_of(1000);
        let conf = vec![0.0f32; 1000];
        let out = mask_guided_select(&cloud, &conf, &cfg(100, 0.5)).unwrap();
        assert_eq!(out.len(), 100);
    }

    #[test]
    fn budget_split_keeps_all_foreground() {
        let cloud = cloud_of(1000);
        let mut conf = vec![0.0f32; 1000];
        for c in conf.iter_mut().take(50) {
            *c = 0.9;
        }
        let out = mask_guided_select(&cloud, &conf, &cfg(100, 0.5)).unwrap();
        assert_eq!(out.len(), 100);
        let fg_kept = out.points().iter().filter(|p| p.x < 50.0).count();
        assert_eq!(fg_kept, 50);
    }

    #[test]
    fn foreground_overflow_drops_background() {
        let cloud = cloud_of(1000);
        let mut conf = vec![0.0f32; 1000];
        for c in conf.iter_mut().take(200) {
            *c = 0.9;
        }
        let out = mask_guided_select(&cloud, &conf, &cfg(100, 0.5)).unwrap();
        assert_eq!(out.len(), 100);
        assert!(out.points().iter().all(|p| p.x < 200.0));
    }

    #[test]
    fn threshold_is_strictly_greater() {
        let cloud = cloud_of(4);
        let conf = vec![0.5f32, 0.5, 0.6, 0.4];
        let out = mask_guided_select(&cloud, &conf, &cfg(1, 0.5)).unwrap();
        // Only index 2 is foreground; it exactly fills the budget.
        assert_eq!(out.len(), 1);
        assert_eq!(out.points()[0].x, 2.0);
    }

    #[test]
    fn conf_length_mismatch_rejected() {
        let cloud = cloud_of(4);
        assert!(matches!(
            mask_guided_select(&cloud, &[0.0; 3], &cfg(2, 0.5)),
            Err(CloudError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn output_partitions_into_fg_and_bg() {
        let cloud = cloud_of(500);
        let conf: Vec<f32> = (0..500).map(|i| if i % 3 == 0 { 0.8 } else { 0.1 }).collect();
        let out = mask_guided_select(&cloud, &conf, &cfg(300, 0.5)).unwrap();
        let fg_total = conf.iter().filter(|&&c| c > 0.5).count();
        let fg_kept = out
            .points()
            .iter()
            .filter(|p| (p.x as usize) % 3 == 0)
            .count();
        assert_eq!(fg_kept, fg_total);
        assert_eq!(out.len(), 300);
        // No duplicates: selection never re-emits a point.
        let mut xs: Vec<i64> = out.points().iter().map(|p| p.x as i64).collect();
        xs.sort_unstable();
        xs.dedup();
        assert_eq!(xs.len(), 300);
    }
}

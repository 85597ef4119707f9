//! Brute-force AP40 reference: instead of one greedy pass with cumulative
//! counts, the score threshold sweep re-runs the matching from scratch for
//! every distinct score and reads precision/recall directly off the counts.
//! Greedy matching in descending score order makes the two routes provably
//! equal, which is exactly what the equivalence check exercises.

use crate::geometry::{iou_3d, iou_bev, Box3D};
use crate::kitti_io::{BBox2D, ClassName, LabelRecord};
use crate::metrics::{
    Difficulty, DifficultyCriteria, DontCareMode, FramePair, OverlapMetric,
};

/// Reference evaluation result.
#[derive(Debug, Clone, PartialEq)]
pub struct RefAp {
    pub ap_percent: f64,
    pub precision_at_recall: Vec<f64>,
    pub num_valid_gt: usize,
}

fn label_box(label: &LabelRecord) -> Option<Box3D> {
    let (h, w, l) = label.dims;
    Box3D::new(
        crate::geometry::Frame::Camera,
        label.location,
        (l, w, h),
        label.rotation_y,
    )
    .ok()
}

fn box_overlap(metric: OverlapMetric, a: &Box3D, b: &Box3D) -> f64 {
    match metric {
        OverlapMetric::Bev => iou_bev(a, b).unwrap_or(0.0),
        OverlapMetric::Iou3d => iou_3d(a, b).unwrap_or(0.0),
    }
}

/// Counts (tp, fp) in one frame using only detections with score >= cutoff.
#[allow(clippy::too_many_arguments)]
fn count_frame(
    frame: &FramePair,
    cutoff: f64,
    class: ClassName,
    difficulty: Difficulty,
    iou_threshold: f64,
    metric: OverlapMetric,
    criteria: &DifficultyCriteria,
    dontcare_mode: DontCareMode,
) -> (usize, usize) {
    let mut scoring: Vec<Box3D> = Vec::new();
    let mut absorbing: Vec<Box3D> = Vec::new();
    let mut dc_regions: Vec<BBox2D> = Vec::new();
    for gt in &frame.gt {
        if gt.class_name == ClassName::DontCare {
            if dontcare_mode == DontCareMode::Official {
                dc_regions.push(gt.bbox2d);
            }
        } else if gt.class_name == class {
            if let Some(b) = label_box(gt) {
                if criteria.qualifies(gt, difficulty) {
                    scoring.push(b);
                } else {
                    absorbing.push(b);
                }
            }
        }
    }

    let mut dets: Vec<(usize, &LabelRecord)> = frame
        .det
        .iter()
        .enumerate()
        .filter(|(_, d)| d.class_name == class && d.score.unwrap_or(f64::NEG_INFINITY) >= cutoff)
        .collect();
    dets.sort_by(|(ia, a), (ib, b)| {
        b.score
            .unwrap()
            .partial_cmp(&a.score.unwrap())
            .unwrap()
            .then(ia.cmp(ib))
    });

    let mut scoring_used = vec![false; scoring.len()];
    let mut absorbing_used = vec![false; absorbing.len()];
    let mut tp = 0;
    let mut fp = 0;
    for (_, det) in dets {
        let det_box = label_box(det);
        let mut best_overlap = f64::NEG_INFINITY;
        let mut best: Option<(bool, usize)> = None;
        if let Some(db) = &det_box {
            for (pool_is_scoring, pool, used) in [
                (true, &scoring, &scoring_used),
                (false, &absorbing, &absorbing_used),
            ] {
                for (j, gt_box) in pool.iter().enumerate() {
                    if used[j] {
                        continue;
                    }
                    let o = box_overlap(metric, db, gt_box);
                    if o >= iou_threshold && o > best_overlap {
                        best_overlap = o;
                        best = Some((pool_is_scoring, j));
                    }
                }
            }
        }
        match best {
            Some((true, j)) => {
                scoring_used[j] = true;
                tp += 1;
            }
            Some((false, j)) => {
                absorbing_used[j] = true;
            }
            None => {
                let area = det.bbox2d.area();
                let covered = area > 0.0
                    && dc_regions
                        .iter()
                        .any(|dc| det.bbox2d.intersection_area(dc) / area > 0.5);
                if !covered {
                    fp += 1;
                }
            }
        }
    }
    (tp, fp)
}

/// Direct implementation of the AP40 definition; `None` when the
/// (class, difficulty) slice has no qualifying ground truth.
#[allow(clippy::too_many_arguments)]
pub fn reference_ap40(
    frames: &[FramePair],
    class: ClassName,
    difficulty: Difficulty,
    iou_threshold: f64,
    metric: OverlapMetric,
    criteria: &DifficultyCriteria,
    dontcare_mode: DontCareMode,
) -> Option<RefAp> {
    let num_valid_gt: usize = frames
        .iter()
        .flat_map(|f| &f.gt)
        .filter(|gt| {
            gt.class_name == class
                && gt.class_name != ClassName::DontCare
                && label_box(gt).is_some()
                && criteria.qualifies(gt, difficulty)
        })
        .count();
    if num_valid_gt == 0 {
        return None;
    }

    let mut cutoffs: Vec<f64> = frames
        .iter()
        .flat_map(|f| &f.det)
        .filter(|d| d.class_name == class)
        .filter_map(|d| d.score)
        .collect();
    cutoffs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    cutoffs.dedup();

    let mut operating_points: Vec<(f64, f64)> = Vec::new();
    for &cutoff in &cutoffs {
        let mut tp = 0;
        let mut fp = 0;
        for frame in frames {
            let (t, f) = count_frame(
                frame,
                cutoff,
                class,
                difficulty,
                iou_threshold,
                metric,
                criteria,
                dontcare_mode,
            );
            tp += t;
            fp += f;
        }
        if tp + fp > 0 {
            operating_points.push((
                tp as f64 / (tp + fp) as f64,
                tp as f64 / num_valid_gt as f64,
            ));
        }
    }

    let precision_at_recall: Vec<f64> = (1..=40)
        .map(|i| {
            let r = i as f64 / 40.0;
            let mut best = 0.0f64;
            for &(p, recall) in &operating_points {
                if recall >= r && p > best {
                    best = p;
                }
            }
            best
        })
        .collect();
    let ap_percent = precision_at_recall.iter().sum::<f64>() / 40.0 * 100.0;
    Some(RefAp {
        ap_percent,
        precision_at_recall,
        num_valid_gt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gt_label(x: f64, z: f64) -> LabelRecord {
        LabelRecord {
            class_name: ClassName::Car,
            truncation: 0.0,
            occlusion: 0,
            alpha: 0.0,
            bbox2d: BBox2D {
                left: 100.0,
                top: 100.0,
                right: 160.0,
                bottom: 150.0,
            },
            dims: (1.5, 1.6, 3.9),
            location: (x, 1.5, z),
            rotation_y: 0.0,
            score: None,
        }
    }

    #[test]
    fn reference_gives_100_for_perfect_detections() {
        let gt = vec![gt_label(0.0, 10.0), gt_label(6.0, 25.0)];
        let det: Vec<LabelRecord> = gt
            .iter()
            .map(|g| {
                let mut d = g.clone();
                d.score = Some(0.75);
                d
            })
            .collect();
        let frames = vec![FramePair { gt, det }];
        let r = reference_ap40(
            &frames,
            ClassName::Car,
            Difficulty::Easy,
            0.7,
            OverlapMetric::Iou3d,
            &DifficultyCriteria::kitti(),
            DontCareMode::Official,
        )
        .unwrap();
        assert_eq!(r.ap_percent, 100.0);
    }

    #[test]
    fn reference_none_without_gt() {
        let frames = vec![FramePair::default()];
        assert!(reference_ap40(
            &frames,
            ClassName::Car,
            Difficulty::Easy,
            0.5,
            OverlapMetric::Bev,
            &DifficultyCriteria::kitti(),
            DontCareMode::Official,
        )
        .is_none());
    }
}

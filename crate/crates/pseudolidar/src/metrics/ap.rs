//! AP40: greedy score-ordered matching, a threshold sweep over distinct
//! scores, and 40-point interpolated-precision sampling.

use serde::{Deserialize, Serialize};

use crate::geometry::{iou_3d, iou_bev, Box3D, Frame};
use crate::kitti_io::{BBox2D, ClassName, LabelRecord};

use super::difficulty::{Difficulty, DifficultyCriteria};
use super::MetricsError;

/// Which overlap drives the matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapMetric {
    /// Ground-plane footprint overlap.
    Bev,
    /// Full volumetric overlap.
    Iou3d,
}

/// How DontCare regions are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DontCareMode {
    /// Unmatched detections overlapping a DontCare 2D region with
    /// intersection-over-area > 0.5 are removed from FP counting.
    Official,
    /// DontCare rows are ignored entirely.
    Simple,
}

/// Ground truth and detections of one frame.
#[derive(Debug, Clone, Default)]
pub struct FramePair {
    pub gt: Vec<LabelRecord>,
    pub det: Vec<LabelRecord>,
}

/// One evaluated cell of the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ap40Result {
    /// Mean interpolated precision over the 40 recall samples, in percent.
    pub ap_percent: f64,
    /// Interpolated precision at recall i/40 for i = 1..=40.
    pub precision_at_recall: Vec<f64>,
    /// Ground-truth boxes qualifying at this class/difficulty.
    pub num_valid_gt: usize,
    /// Detections of the class entering the sweep (after DontCare removal).
    pub num_detections: usize,
}

/// Camera-frame box of a label; `None` when the extents are degenerate
/// (DontCare placeholders).
pub(crate) fn label_box_camera(label: &LabelRecord) -> Option<Box3D> {
    let (h, w, l) = label.dims;
    Box3D::new(Frame::Camera, label.location, (l, w, h), label.rotation_y).ok()
}

fn overlap(metric: OverlapMetric, a: &Box3D, b: &Box3D) -> f64 {
    match metric {
        OverlapMetric::Bev => iou_bev(a, b).unwrap_or(0.0),
        OverlapMetric::Iou3d => iou_3d(a, b).unwrap_or(0.0),
    }
}

fn covered_by_dontcare(det: &BBox2D, dontcare: &[BBox2D]) -> bool {
    let area = det.area();
    if area <= 0.0 {
        return false;
    }
    dontcare
        .iter()
        .any(|dc| det.intersection_area(dc) / area > 0.5)
}

/// Matching events of one frame under the greedy rule. Split out so the
/// whole sweep can reuse a single pass: greedy matching in descending score
/// order makes every score-threshold restriction a prefix of this pass.
struct FrameEvents {
    /// (score, is_true_positive) per counted detection.
    events: Vec<(f64, bool)>,
    num_valid_gt: usize,
    num_detections: usize,
}

fn match_frame(
    frame: &FramePair,
    frame_idx: usize,
    class: ClassName,
    difficulty: Difficulty,
    iou_threshold: f64,
    metric: OverlapMetric,
    criteria: &DifficultyCriteria,
    dontcare_mode: DontCareMode,
) -> Result<FrameEvents, MetricsError> {
    // Ground truth of the class splits into difficulty-qualified (scoring)
    // and unqualified (ignored: matching one is neither TP nor FP).
    let mut valid: Vec<Box3D> = Vec::new();
    let mut ignored: Vec<Box3D> = Vec::new();
    let mut dontcare: Vec<BBox2D> = Vec::new();
    for gt in &frame.gt {
        if gt.class_name == ClassName::DontCare {
            if dontcare_mode == DontCareMode::Official {
                dontcare.push(gt.bbox2d);
            }
            continue;
        }
        if gt.class_name != class {
            continue;
        }
        let Some(gt_box) = label_box_camera(gt) else {
            continue;
        };
        if criteria.qualifies(gt, difficulty) {
            valid.push(gt_box);
        } else {
            ignored.push(gt_box);
        }
    }

    let mut order: Vec<usize> = (0..frame.det.len())
        .filter(|&i| frame.det[i].class_name == class)
        .collect();
    for &i in &order {
        if frame.det[i].score.is_none() {
            return Err(MetricsError::MissingScore { frame: frame_idx });
        }
    }
    // Descending score; ties keep detection-file order.
    order.sort_by(|&a, &b| {
        frame.det[b]
            .score
            .unwrap()
            .partial_cmp(&frame.det[a].score.unwrap())
            .unwrap()
            .then(a.cmp(&b))
    });

    let mut valid_taken = vec![false; valid.len()];
    let mut ignored_taken = vec![false; ignored.len()];
    let mut events = Vec::with_capacity(order.len());
    let mut num_detections = 0;

    for &i in &order {
        let det = &frame.det[i];
        let score = det.score.unwrap();
        let det_box = label_box_camera(det);

        // Best unmatched ground truth by overlap; valid boxes are scanned
        // first so an exact tie resolves to a scoring match.
        let mut best: Option<(bool, usize, f64)> = None;
        if let Some(det_box) = &det_box {
            for (j, gt_box) in valid.iter().enumerate() {
                if valid_taken[j] {
                    continue;
                }
                let o = overlap(metric, det_box, gt_box);
                if o >= iou_threshold && best.map_or(true, |(_, _, b)| o > b) {
                    best = Some((true, j, o));
                }
            }
            for (j, gt_box) in ignored.iter().enumerate() {
                if ignored_taken[j] {
                    continue;
                }
                let o = overlap(metric, det_box, gt_box);
                if o >= iou_threshold && best.map_or(true, |(_, _, b)| o > b) {
                    best = Some((false, j, o));
                }
            }
        }

        match best {
            Some((true, j, _)) => {
                valid_taken[j] = true;
                events.push((score, true));
                num_detections += 1;
            }
            Some((false, j, _)) => {
                // Absorbed by an ignored box: neither TP nor FP.
                ignored_taken[j] = true;
            }
            None => {
                if covered_by_dontcare(&det.bbox2d, &dontcare) {
                    continue;
                }
                events.push((score, false));
                num_detections += 1;
            }
        }
    }

    Ok(FrameEvents {
        events,
        num_valid_gt: valid.len(),
        num_detections,
    })
}

/// AP40 for one (class, difficulty, IoU threshold, overlap metric) cell.
///
/// Detections are matched greedily in descending score order to the
/// unmatched ground truth with the highest overlap at or above the
/// threshold; the score threshold is then swept over distinct scores (ties
/// share one operating point) and interpolated precision is sampled at the
/// 40 recall points i/40.
#[allow(clippy::too_many_arguments)]
pub fn ap40(
    frames: &[FramePair],
    class: ClassName,
    difficulty: Difficulty,
    iou_threshold: f64,
    metric: OverlapMetric,
    criteria: &DifficultyCriteria,
    dontcare_mode: DontCareMode,
) -> Result<Ap40Result, MetricsError> {
    let mut events: Vec<(f64, bool)> = Vec::new();
    let mut num_valid_gt = 0;
    let mut num_detections = 0;
    for (idx, frame) in frames.iter().enumerate() {
        let fe = match_frame(
            frame,
            idx,
            class,
            difficulty,
            iou_threshold,
            metric,
            criteria,
            dontcare_mode,
        )?;
        events.extend(fe.events);
        num_valid_gt += fe.num_valid_gt;
        num_detections += fe.num_detections;
    }
    if num_valid_gt == 0 {
        return Err(MetricsError::NoGroundTruth { class, difficulty });
    }

    events.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    // One operating point per distinct score.
    let mut operating_points: Vec<(f64, f64)> = Vec::new(); // (precision, recall)
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < events.len() {
        let score = events[i].0;
        while i < events.len() && events[i].0 == score {
            if events[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        operating_points.push((
            tp as f64 / (tp + fp) as f64,
            tp as f64 / num_valid_gt as f64,
        ));
    }

    let precision_at_recall: Vec<f64> = (1..=40)
        .map(|i| {
            let r = i as f64 / 40.0;
            operating_points
                .iter()
                .filter(|(_, recall)| *recall >= r)
                .map(|(p, _)| *p)
                .fold(0.0, f64::max)
        })
        .collect();
    let ap_percent = precision_at_recall.iter().sum::<f64>() / 40.0 * 100.0;

    Ok(Ap40Result {
        ap_percent,
        precision_at_recall,
        num_valid_gt,
        num_detections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gt_label(x: f64, z: f64, height_px: f64) -> LabelRecord {
        LabelRecord {
            class_name: ClassName::Car,
            truncation: 0.0,
            occlusion: 0,
            alpha: 0.0,
            bbox2d: BBox2D {
                left: 100.0,
                top: 100.0,
                right: 160.0,
                bottom: 100.0 + height_px,
            },
            dims: (1.5, 1.6, 3.9),
            location: (x, 1.5, z),
            rotation_y: 0.0,
            score: None,
        }
    }

    fn with_score(mut label: LabelRecord, score: f64) -> LabelRecord {
        label.score = Some(score);
        label
    }

    fn eval(
        frames: &[FramePair],
        difficulty: Difficulty,
        threshold: f64,
        metric: OverlapMetric,
    ) -> Result<Ap40Result, MetricsError> {
        ap40(
            frames,
            ClassName::Car,
            difficulty,
            threshold,
            metric,
            &DifficultyCriteria::kitti(),
            DontCareMode::Official,
        )
    }

    #[test]
    fn perfect_detections_are_100() {
        let gt = vec![gt_label(0.0, 10.0, 50.0), gt_label(5.0, 20.0, 45.0)];
        let det: Vec<LabelRecord> = gt.iter().map(|g| with_score(g.clone(), 1.0)).collect();
        let frames = vec![FramePair { gt, det }];
        for metric in [OverlapMetric::Bev, OverlapMetric::Iou3d] {
            for threshold in [0.5, 0.7] {
                let r = eval(&frames, Difficulty::Easy, threshold, metric).unwrap();
                assert_eq!(r.ap_percent, 100.0);
                assert!(r.precision_at_recall.iter().all(|&p| p == 1.0));
            }
        }
    }

    #[test]
    fn zero_detections_are_0() {
        let frames = vec![FramePair {
            gt: vec![gt_label(0.0, 10.0, 50.0)],
            det: vec![],
        }];
        let r = eval(&frames, Difficulty::Easy, 0.5, OverlapMetric::Iou3d).unwrap();
        assert_eq!(r.ap_percent, 0.0);
    }

    #[test]
    fn no_ground_truth_is_undefined_not_zero() {
        let frames = vec![FramePair {
            gt: vec![],
            det: vec![with_score(gt_label(0.0, 10.0, 50.0), 0.9)],
        }];
        assert!(matches!(
            eval(&frames, Difficulty::Easy, 0.5, OverlapMetric::Bev),
            Err(MetricsError::NoGroundTruth { .. })
        ));
    }

    #[test]
    fn trailing_false_positive_keeps_ap_100() {
        // 1 GT; a perfect detection at score 0.9 plus a far FP at 0.8.
        // Recall 1 is reached at precision 1 before the FP enters the sweep,
        // so every interpolated precision sample stays 1.
        let gt = vec![gt_label(0.0, 10.0, 50.0)];
        let det = vec![
            with_score(gt_label(0.0, 10.0, 50.0), 0.9),
            with_score(gt_label(50.0, 50.0, 50.0), 0.8),
        ];
        let frames = vec![FramePair { gt, det }];
        let r = eval(&frames, Difficulty::Easy, 0.5, OverlapMetric::Iou3d).unwrap();
        assert_eq!(r.ap_percent, 100.0);
    }

    #[test]
    fn ignored_gt_neither_tp_nor_fp() {
        // The short GT fails every difficulty, so a detection matching it is
        // absorbed; with no valid GT matched the curve would be empty, and
        // another valid GT keeps AP defined.
        let gt = vec![gt_label(0.0, 10.0, 50.0), gt_label(8.0, 30.0, 10.0)];
        let det = vec![
            with_score(gt_label(0.0, 10.0, 50.0), 0.9),
            with_score(gt_label(8.0, 30.0, 10.0), 0.8),
        ];
        let frames = vec![FramePair { gt, det }];
        let r = eval(&frames, Difficulty::Hard, 0.5, OverlapMetric::Iou3d).unwrap();
        assert_eq!(r.num_valid_gt, 1);
        assert_eq!(r.num_detections, 1); // the absorbed detection is not counted
        assert_eq!(r.ap_percent, 100.0);
    }

    #[test]
    fn dontcare_suppresses_fp_in_official_mode() {
        let mut dc = gt_label(0.0, 10.0, 50.0);
        dc.class_name = ClassName::DontCare;
        dc.bbox2d = BBox2D {
            left: 300.0,
            top: 100.0,
            right: 400.0,
            bottom: 200.0,
        };
        let mut fp_det = with_score(gt_label(30.0, 50.0, 50.0), 0.8);
        fp_det.bbox2d = BBox2D {
            left: 310.0,
            top: 110.0,
            right: 390.0,
            bottom: 190.0,
        }; // fully inside the DontCare region
        let gt = vec![gt_label(0.0, 10.0, 50.0), dc];
        let det = vec![with_score(gt_label(0.0, 10.0, 50.0), 0.9), fp_det];

        let frames = vec![FramePair { gt, det }];
        let official = ap40(
            &frames,
            ClassName::Car,
            Difficulty::Easy,
            0.5,
            OverlapMetric::Iou3d,
            &DifficultyCriteria::kitti(),
            DontCareMode::Official,
        )
        .unwrap();
        assert_eq!(official.num_detections, 1);
        assert_eq!(official.ap_percent, 100.0);

        let simple = ap40(
            &frames,
            ClassName::Car,
            Difficulty::Easy,
            0.5,
            OverlapMetric::Iou3d,
            &DifficultyCriteria::kitti(),
            DontCareMode::Simple,
        )
        .unwrap();
        assert_eq!(simple.num_detections, 2);
        // The FP arrives after recall 1 was reached, so AP is still 100.
        assert_eq!(simple.ap_percent, 100.0);
    }

    #[test]
    fn score_order_beats_file_order() {
        // Low-score det listed first; the high-score det must match first.
        let gt = vec![gt_label(0.0, 10.0, 50.0)];
        let near_miss = {
            let mut l = gt_label(0.6, 10.0, 50.0);
            l.location = (0.6, 1.5, 10.0);
            l
        };
        let det = vec![with_score(near_miss, 0.3), with_score(gt_label(0.0, 10.0, 50.0), 0.9)];
        let frames = vec![FramePair { gt, det }];
        let r = eval(&frames, Difficulty::Easy, 0.5, OverlapMetric::Iou3d).unwrap();
        // Perfect det matches at score .9 (P=1, R=1); the near miss at .3
        // becomes FP on the second operating point. Interpolation keeps 1.
        assert_eq!(r.ap_percent, 100.0);
        assert_eq!(r.num_detections, 2);
    }

    #[test]
    fn half_recall_gives_half_ap() {
        // 2 GT, one matched perfectly: recall caps at 0.5, precision 1.
        let gt = vec![gt_label(0.0, 10.0, 50.0), gt_label(8.0, 30.0, 50.0)];
        let det = vec![with_score(gt_label(0.0, 10.0, 50.0), 0.9)];
        let frames = vec![FramePair { gt, det }];
        let r = eval(&frames, Difficulty::Easy, 0.5, OverlapMetric::Iou3d).unwrap();
        // Samples 1/40..=20/40 see precision 1, the rest 0.
        assert_eq!(r.ap_percent, 50.0);
    }
}

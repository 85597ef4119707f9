//! Depth accuracy versus distance, probed with ground-truth 2D boxes:
//! the median valid depth inside each box against the label's camera-z.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::kitti_io::{ClassName, LabelRecord, RasterKind, ScalarRaster};

/// Classes covered by the diagnostic.
pub const DIAG_CLASSES: [ClassName; 3] =
    [ClassName::Car, ClassName::Pedestrian, ClassName::Cyclist];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthDiagConfig {
    /// A box counts as correct when |d_pred - d_gt| <= threshold (inclusive).
    pub threshold_m: f64,
    /// Cumulative range bounds in meters; a box contributes to every bucket
    /// whose bound is at or beyond its ground-truth depth.
    pub buckets: Vec<f64>,
    /// Validity range applied to depth pixels before taking the median
    /// (strict bounds).
    pub depth_min: f64,
    pub depth_max: f64,
}

impl Default for DepthDiagConfig {
    fn default() -> Self {
        Self {
            threshold_m: 1.5,
            buckets: vec![20.0, 40.0, 80.0],
            depth_min: 1.0,
            depth_max: 60.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthDiagCell {
    pub correct: usize,
    pub total: usize,
}

impl DepthDiagCell {
    pub fn accuracy_percent(&self) -> Option<f64> {
        (self.total > 0).then(|| 100.0 * self.correct as f64 / self.total as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthDiagReport {
    pub config: DepthDiagConfig,
    /// Per class, one cell per bucket (aligned with `config.buckets`).
    pub cells: BTreeMap<ClassName, Vec<DepthDiagCell>>,
}

impl DepthDiagReport {
    pub fn cell(&self, class: ClassName, bucket_idx: usize) -> DepthDiagCell {
        self.cells
            .get(&class)
            .and_then(|row| row.get(bucket_idx))
            .copied()
            .unwrap_or_default()
    }

    /// Plain-text table: one row per (class, bucket) with accuracy and counts.
    pub fn render_table(&self) -> String {
        let mut out = String::from(
            "Depth accuracy vs distance (GT 2D boxes)\n\
             class        range      accuracy   correct/total\n",
        );
        for class in DIAG_CLASSES {
            for (i, bound) in self.config.buckets.iter().enumerate() {
                let cell = self.cell(class, i);
                let acc = cell
                    .accuracy_percent()
                    .map_or("   --".to_string(), |a| format!("{a:5.1}"));
                out.push_str(&format!(
                    "{:<12} <= {:<5} {}      {}/{}\n",
                    class.as_str(),
                    bound,
                    acc,
                    cell.correct,
                    cell.total
                ));
            }
        }
        out
    }
}

/// Streaming accumulator over frames.
#[derive(Debug, Clone)]
pub struct DepthDiagAccumulator {
    config: DepthDiagConfig,
    cells: BTreeMap<ClassName, Vec<DepthDiagCell>>,
}

impl DepthDiagAccumulator {
    pub fn new(config: DepthDiagConfig) -> Self {
        let cells = DIAG_CLASSES
            .into_iter()
            .map(|c| (c, vec![DepthDiagCell::default(); config.buckets.len()]))
            .collect();
        Self { config, cells }
    }

    /// Folds one frame in: every Car/Pedestrian/Cyclist ground-truth box is
    /// scored against the median valid depth inside its 2D box. Boxes with
    /// no valid depth pixels count as incorrect.
    pub fn add_frame(&mut self, gt_labels: &[LabelRecord], depth: &ScalarRaster) {
        debug_assert_eq!(depth.kind(), RasterKind::DepthMeters);
        for label in gt_labels {
            if !DIAG_CLASSES.contains(&label.class_name) {
                continue;
            }
            let d_gt = label.location.2;
            let correct = match median_box_depth(depth, label, &self.config) {
                Some(d_pred) => (d_pred - d_gt).abs() <= self.config.threshold_m,
                None => false,
            };
            let row = self.cells.get_mut(&label.class_name).expect("diag class");
            for (i, bound) in self.config.buckets.iter().enumerate() {
                if d_gt <= *bound {
                    row[i].total += 1;
                    if correct {
                        row[i].correct += 1;
                    }
                }
            }
        }
    }

    pub fn finish(self) -> DepthDiagReport {
        DepthDiagReport {
            config: self.config,
            cells: self.cells,
        }
    }
}

fn median_box_depth(
    depth: &ScalarRaster,
    label: &LabelRecord,
    cfg: &DepthDiagConfig,
) -> Option<f64> {
    let b = &label.bbox2d;
    if depth.width() == 0 || depth.height() == 0 {
        return None;
    }
    // Pixel (u, v) is inside when its index falls within the box, clipped to
    // the raster.
    let u0 = b.left.ceil().max(0.0) as usize;
    let v0 = b.top.ceil().max(0.0) as usize;
    let u1f = b.right.floor().min((depth.width() - 1) as f64);
    let v1f = b.bottom.floor().min((depth.height() - 1) as f64);
    if u1f < u0 as f64 || v1f < v0 as f64 {
        return None;
    }
    let (u1, v1) = (u1f as usize, v1f as usize);
    let mut values = Vec::new();
    for v in v0..=v1 {
        for u in u0..=u1 {
            let d = depth.get(u, v) as f64;
            if d > cfg.depth_min && d < cfg.depth_max {
                values.push(d);
            }
        }
    }
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

/// One-shot evaluation over a frame set.
pub fn depth_diagnostic(
    frames: &[(Vec<LabelRecord>, ScalarRaster)],
    config: DepthDiagConfig,
) -> DepthDiagReport {
    let mut acc = DepthDiagAccumulator::new(config);
    for (labels, depth) in frames {
        acc.add_frame(labels, depth);
    }
    acc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kitti_io::BBox2D;

    fn uniform_depth(w: usize, h: usize, value: f32) -> ScalarRaster {
        ScalarRaster::new(w, h, RasterKind::DepthMeters, vec![value; w * h]).unwrap()
    }

    fn car_at(z: f64) -> LabelRecord {
        LabelRecord {
            class_name: ClassName::Car,
            truncation: 0.0,
            occlusion: 0,
            alpha: 0.0,
            bbox2d: BBox2D {
                left: 10.0,
                top: 10.0,
                right: 30.0,
                bottom: 30.0,
            },
            dims: (1.5, 1.6, 3.9),
            location: (0.0, 1.5, z),
            rotation_y: 0.0,
            score: None,
        }
    }

    #[test]
    fn matching_uniform_depth_is_fully_correct() {
        let mut acc = DepthDiagAccumulator::new(DepthDiagConfig::default());
        acc.add_frame(&[car_at(15.0)], &uniform_depth(64, 64, 15.0));
        let report = acc.finish();
        for i in 0..3 {
            let cell = report.cell(ClassName::Car, i);
            assert_eq!(cell.total, 1);
            assert_eq!(cell.accuracy_percent(), Some(100.0));
        }
    }

    #[test]
    fn boundary_error_of_exactly_1p5_counts_correct() {
        let mut acc = DepthDiagAccumulator::new(DepthDiagConfig::default());
        acc.add_frame(&[car_at(10.0)], &uniform_depth(64, 64, 11.5));
        let report = acc.finish();
        assert_eq!(report.cell(ClassName::Car, 0).correct, 1);

        let mut acc = DepthDiagAccumulator::new(DepthDiagConfig::default());
        acc.add_frame(&[car_at(10.0)], &uniform_depth(64, 64, 11.5 + 1e-3));
        assert_eq!(acc.finish().cell(ClassName::Car, 0).correct, 0);
    }

    #[test]
    fn cumulative_bucket_arithmetic() {
        // One correct car at 15 m, one incorrect at 35 m.
        let mut acc = DepthDiagAccumulator::new(DepthDiagConfig::default());
        acc.add_frame(&[car_at(15.0)], &uniform_depth(64, 64, 15.0));
        acc.add_frame(&[car_at(35.0)], &uniform_depth(64, 64, 50.0));
        let report = acc.finish();
        assert_eq!(report.cell(ClassName::Car, 0).accuracy_percent(), Some(100.0));
        assert_eq!(report.cell(ClassName::Car, 1).accuracy_percent(), Some(50.0));
        assert_eq!(report.cell(ClassName::Car, 2).accuracy_percent(), Some(50.0));
        assert_eq!(report.cell(ClassName::Car, 0).total, 1);
        assert_eq!(report.cell(ClassName::Car, 2).total, 2);
    }

    #[test]
    fn invalid_depth_counts_incorrect() {
        // All pixels outside the (1, 60) validity window.
        let mut acc = DepthDiagAccumulator::new(DepthDiagConfig::default());
        acc.add_frame(&[car_at(10.0)], &uniform_depth(64, 64, 0.0));
        let report = acc.finish();
        assert_eq!(report.cell(ClassName::Car, 0).total, 1);
        assert_eq!(report.cell(ClassName::Car, 0).correct, 0);
    }

    #[test]
    fn other_classes_are_not_probed() {
        let mut van = car_at(10.0);
        van.class_name = ClassName::Van;
        let mut acc = DepthDiagAccumulator::new(DepthDiagConfig::default());
        acc.add_frame(&[van], &uniform_depth(64, 64, 10.0));
        let report = acc.finish();
        assert_eq!(report.cell(ClassName::Car, 2).total, 0);
    }

    #[test]
    fn median_is_taken_inside_the_box_only() {
        // 40x40 raster: depth 10 inside the box, 50 outside.
        let mut values = vec![50.0f32; 1600];
        for v in 10..=30usize {
            for u in 10..=30usize {
                values[v * 40 + u] = 10.0;
            }
        }
        let raster = ScalarRaster::new(40, 40, RasterKind::DepthMeters, values).unwrap();
        let mut acc = DepthDiagAccumulator::new(DepthDiagConfig::default());
        acc.add_frame(&[car_at(10.0)], &raster);
        assert_eq!(acc.finish().cell(ClassName::Car, 0).correct, 1);
    }

    #[test]
    fn widening_threshold_never_decreases_accuracy() {
        let frames: Vec<(Vec<LabelRecord>, ScalarRaster)> = (0..6)
            .map(|i| {
                let z = 8.0 + i as f64 * 9.0;
                let measured = z + (i as f64 - 2.5) * 0.8;
                (vec![car_at(z)], uniform_depth(32, 32, measured as f32))
            })
            .collect();
        let narrow = depth_diagnostic(&frames, DepthDiagConfig::default());
        let wide = depth_diagnostic(
            &frames,
            DepthDiagConfig {
                threshold_m: 3.0,
                ..DepthDiagConfig::default()
            },
        );
        for i in 0..3 {
            let a = narrow.cell(ClassName::Car, i);
            let b = wide.cell(ClassName::Car, i);
            assert_eq!(a.total, b.total);
            assert!(b.correct >= a.correct);
        }
    }
}

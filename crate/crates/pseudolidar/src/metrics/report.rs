//! Evaluation report assembly and rendering.

use serde::{Deserialize, Serialize};

use crate::kitti_io::ClassName;

use super::ap::{ap40, Ap40Result, DontCareMode, FramePair, OverlapMetric};
use super::difficulty::{Difficulty, DifficultyCriteria};
use super::MetricsError;

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub classes: Vec<ClassName>,
    pub iou_thresholds: Vec<f64>,
    pub criteria: DifficultyCriteria,
    pub dontcare_mode: DontCareMode,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            classes: vec![ClassName::Car],
            iou_thresholds: vec![0.5, 0.7],
            criteria: DifficultyCriteria::kitti(),
            dontcare_mode: DontCareMode::Official,
        }
    }
}

/// AP_BEV/AP_3D for one difficulty. Cells with no qualifying ground truth
/// are absent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DifficultyEval {
    pub difficulty: Difficulty,
    pub bev: Option<Ap40Result>,
    pub box3d: Option<Ap40Result>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdEval {
    pub iou_threshold: f64,
    pub difficulties: Vec<DifficultyEval>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassEval {
    pub class_name: ClassName,
    pub thresholds: Vec<ThresholdEval>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub dontcare_mode: DontCareMode,
    /// Hash of the resolved run configuration, stamped by the CLI.
    pub config_hash: Option<String>,
    pub classes: Vec<ClassEval>,
}

impl EvalReport {
    pub fn cell(
        &self,
        class: ClassName,
        iou_threshold: f64,
        difficulty: Difficulty,
        metric: OverlapMetric,
    ) -> Option<&Ap40Result> {
        let class_eval = self.classes.iter().find(|c| c.class_name == class)?;
        let threshold = class_eval
            .thresholds
            .iter()
            .find(|t| t.iou_threshold == iou_threshold)?;
        let cell = threshold
            .difficulties
            .iter()
            .find(|d| d.difficulty == difficulty)?;
        match metric {
            OverlapMetric::Bev => cell.bev.as_ref(),
            OverlapMetric::Iou3d => cell.box3d.as_ref(),
        }
    }

    /// Plain-text table with AP_BEV/AP_3D pairs per difficulty, one block of
    /// columns per IoU threshold.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "AP40 (%): AP_BEV/AP_3D — DontCare mode: {}\n",
            match self.dontcare_mode {
                DontCareMode::Official => "official",
                DontCareMode::Simple => "simple",
            }
        ));
        if let Some(hash) = &self.config_hash {
            out.push_str(&format!("config: {hash}\n"));
        }
        for class_eval in &self.classes {
            out.push_str(&format!("\n{}\n", class_eval.class_name));
            let mut header = format!("{:<14}", "");
            let mut row = format!("{:<14}", "AP_BEV/AP_3D");
            for t in &class_eval.thresholds {
                for d in &t.difficulties {
                    header.push_str(&format!(
                        "{:>16}",
                        format!("{:?}@{}", d.difficulty, t.iou_threshold)
                    ));
                    let fmt_cell = |c: &Option<Ap40Result>| {
                        c.as_ref()
                            .map_or("--".to_string(), |r| format!("{:.2}", r.ap_percent))
                    };
                    row.push_str(&format!(
                        "{:>16}",
                        format!("{}/{}", fmt_cell(&d.bev), fmt_cell(&d.box3d))
                    ));
                }
            }
            out.push_str(&header);
            out.push('\n');
            out.push_str(&row);
            out.push('\n');
        }
        out
    }
}

/// Evaluates every (class, IoU threshold, difficulty) cell in both BEV and
/// 3D. Cells without ground truth come back absent; other errors propagate.
pub fn evaluate(frames: &[FramePair], opts: &EvalOptions) -> Result<EvalReport, MetricsError> {
    let mut classes = Vec::new();
    for &class in &opts.classes {
        let mut thresholds = Vec::new();
        for &iou_threshold in &opts.iou_thresholds {
            let mut difficulties = Vec::new();
            for difficulty in Difficulty::ALL {
                let run = |metric| {
                    match ap40(
                        frames,
                        class,
                        difficulty,
                        iou_threshold,
                        metric,
                        &opts.criteria,
                        opts.dontcare_mode,
                    ) {
                        Ok(r) => Ok(Some(r)),
                        Err(MetricsError::NoGroundTruth { .. }) => Ok(None),
                        Err(e) => Err(e),
                    }
                };
                difficulties.push(DifficultyEval {
                    difficulty,
                    bev: run(OverlapMetric::Bev)?,
                    box3d: run(OverlapMetric::Iou3d)?,
                });
            }
            thresholds.push(ThresholdEval {
                iou_threshold,
                difficulties,
            });
        }
        classes.push(ClassEval {
            class_name: class,
            thresholds,
        });
    }
    Ok(EvalReport {
        dontcare_mode: opts.dontcare_mode,
        config_hash: None,
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kitti_io::{BBox2D, LabelRecord};

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
            rotation_y: 0.1,
            score: None,
        }
    }

    #[test]
    fn gt_as_detections_scores_100_everywhere_defined() {
        let frames: Vec<FramePair> = (0..4)
            .map(|i| {
                let gt = vec![gt_label(i as f64, 10.0 + i as f64), gt_label(-3.0, 25.0)];
                let det = gt
                    .iter()
                    .map(|g| {
                        let mut d = g.clone();
                        d.score = Some(1.0);
                        d
                    })
                    .collect();
                FramePair { gt, det }
            })
            .collect();
        let report = evaluate(&frames, &EvalOptions::default()).unwrap();
        let mut defined = 0;
        for class_eval in &report.classes {
            for t in &class_eval.thresholds {
                for d in &t.difficulties {
                    for cell in [&d.bev, &d.box3d].into_iter().flatten() {
                        assert_eq!(cell.ap_percent, 100.0);
                        defined += 1;
                    }
                }
            }
        }
        assert_eq!(defined, 12); // 2 thresholds x 3 difficulties x 2 metrics
        let table = report.render_table();
        assert!(table.contains("100.00/100.00"));
    }

    #[test]
    fn missing_class_cells_are_absent() {
        let frames = vec![FramePair {
            gt: vec![gt_label(0.0, 10.0)],
            det: vec![],
        }];
        let opts = EvalOptions {
            classes: vec![ClassName::Car, ClassName::Pedestrian],
            ..EvalOptions::default()
        };
        let report = evaluate(&frames, &opts).unwrap();
        assert!(report
            .cell(ClassName::Car, 0.5, Difficulty::Easy, OverlapMetric::Bev)
            .is_some());
        assert!(report
            .cell(ClassName::Pedestrian, 0.5, Difficulty::Easy, OverlapMetric::Bev)
            .is_none());
        assert!(report.render_table().contains("--/--"));
    }
}

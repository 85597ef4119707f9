//! `eval`: AP40 evaluation of detection files against ground truth.

use anyhow::{anyhow, Context};
use serde::Serialize;

use pseudolidar::kitti_io::{parse_labels, FormatError, LabelRecord};
use pseudolidar::metrics::{evaluate, Ap40Result, EvalOptions, FramePair};

use crate::config::RunConfig;
use crate::dataset;
use crate::CliError;

use super::{read_text, write_atomic};

/// Detection files normally carry 16 fields; plain label files (e.g. the
/// ground truth evaluated against itself) are accepted with an implied
/// score of 1.
fn parse_detections(text: &str) -> Result<Vec<LabelRecord>, FormatError> {
    match parse_labels(text, true) {
        Ok(dets) => Ok(dets),
        Err(FormatError::WrongFieldCount { got: 15, .. }) => {
            let mut dets = parse_labels(text, false)?;
            for d in &mut dets {
                d.score = Some(1.0);
            }
            Ok(dets)
        }
        Err(e) => Err(e),
    }
}

#[derive(Serialize)]
struct CellRecord<'a> {
    class: &'a str,
    iou_threshold: f64,
    difficulty: String,
    metric: &'a str,
    ap_percent: Option<f64>,
    num_valid_gt: Option<usize>,
    num_detections: Option<usize>,
    precision_at_recall: Option<&'a [f64]>,
    dontcare_mode: &'a str,
    config: &'a str,
}

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let frames = dataset::read_split(&config.split_file).map_err(CliError::Config)?;
    let det_dir = config
        .eval
        .detections_dir
        .clone()
        .unwrap_or_else(|| config.output_dir.join("detections"));

    let mut pairs = Vec::with_capacity(frames.len());
    for frame in &frames {
        let gt_path = dataset::label_path(&config.dataset_root, frame);
        let det_path = dataset::detection_path(&det_dir, frame);
        let load = || -> anyhow::Result<FramePair> {
            let gt = parse_labels(&read_text(&gt_path)?, false)
                .with_context(|| gt_path.display().to_string())?;
            let det = parse_detections(&read_text(&det_path)?)
                .with_context(|| det_path.display().to_string())?;
            Ok(FramePair { gt, det })
        };
        pairs.push(load().map_err(|e| CliError::EvalInput(anyhow!("frame {frame}: {e:#}")))?);
    }

    let opts = EvalOptions {
        classes: config.eval.classes.clone(),
        iou_thresholds: config.eval.iou_thresholds.clone(),
        criteria: Default::default(),
        dontcare_mode: config.eval.dontcare_mode,
    };
    let mut report = evaluate(&pairs, &opts).map_err(|e| CliError::EvalInput(e.into()))?;
    let hash = config.config_hash();
    report.config_hash = Some(hash.clone());

    let table = report.render_table();
    print!("{table}");

    let dontcare = match report.dontcare_mode {
        pseudolidar::metrics::DontCareMode::Official => "official",
        pseudolidar::metrics::DontCareMode::Simple => "simple",
    };
    let mut jsonl = String::new();
    for class_eval in &report.classes {
        for threshold in &class_eval.thresholds {
            for cell in &threshold.difficulties {
                for (metric, result) in [("bev", &cell.bev), ("3d", &cell.box3d)] {
                    let fields = |r: &Option<Ap40Result>| {
                        (
                            r.as_ref().map(|r| r.ap_percent),
                            r.as_ref().map(|r| r.num_valid_gt),
                            r.as_ref().map(|r| r.num_detections),
                        )
                    };
                    let (ap_percent, num_valid_gt, num_detections) = fields(result);
                    let record = CellRecord {
                        class: class_eval.class_name.as_str(),
                        iou_threshold: threshold.iou_threshold,
                        difficulty: format!("{:?}", cell.difficulty),
                        metric,
                        ap_percent,
                        num_valid_gt,
                        num_detections,
                        precision_at_recall: result
                            .as_ref()
                            .map(|r| r.precision_at_recall.as_slice()),
                        dontcare_mode: dontcare,
                        config: &hash,
                    };
                    jsonl.push_str(&serde_json::to_string(&record).expect("record serializes"));
                    jsonl.push('\n');
                }
            }
        }
    }

    write_atomic(&config.output_dir.join("eval_report.txt"), table.as_bytes())
        .map_err(CliError::Config)?;
    write_atomic(&config.output_dir.join("eval_report.jsonl"), jsonl.as_bytes())
        .map_err(CliError::Config)?;
    Ok(())
}

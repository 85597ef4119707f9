//! `depth-diag`: depth accuracy versus distance over the split.

use anyhow::anyhow;
use serde::Serialize;

use pseudolidar::kitti_io::{parse_labels, read_depth_png};
use pseudolidar::metrics::{DepthDiagAccumulator, DepthDiagConfig, DIAG_CLASSES};

use crate::config::RunConfig;
use crate::dataset;
use crate::CliError;

use super::{read_bytes, read_text, write_atomic};

#[derive(Serialize)]
struct DiagRecord<'a> {
    class: &'a str,
    range_max_m: f64,
    accuracy_percent: Option<f64>,
    correct: usize,
    total: usize,
    threshold_m: f64,
    config: &'a str,
}

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let frames = dataset::read_split(&config.split_file).map_err(CliError::Config)?;
    let diag_config = DepthDiagConfig {
        threshold_m: config.depth_diag.threshold_m,
        buckets: config.depth_diag.buckets.clone(),
        ..DepthDiagConfig::default()
    };
    let mut acc = DepthDiagAccumulator::new(diag_config.clone());
    for frame in &frames {
        let mut load = || -> anyhow::Result<()> {
            let labels = parse_labels(
                &read_text(&dataset::label_path(&config.dataset_root, frame))?,
                false,
            )?;
            let depth = read_depth_png(&read_bytes(&dataset::depth_path(
                &config.dataset_root,
                frame,
            ))?)?;
            acc.add_frame(&labels, &depth);
            Ok(())
        };
        load().map_err(|e| CliError::EvalInput(anyhow!("frame {frame}: {e:#}")))?;
    }
    let report = acc.finish();
    let hash = config.config_hash();

    let table = format!("config: {hash}\n{}", report.render_table());
    print!("{table}");

    let mut jsonl = String::new();
    for class in DIAG_CLASSES {
        for (i, bound) in report.config.buckets.iter().enumerate() {
            let cell = report.cell(class, i);
            let record = DiagRecord {
                class: class.as_str(),
                range_max_m: *bound,
                accuracy_percent: cell.accuracy_percent(),
                correct: cell.correct,
                total: cell.total,
                threshold_m: report.config.threshold_m,
                config: &hash,
            };
            jsonl.push_str(&serde_json::to_string(&record).expect("record serializes"));
            jsonl.push('\n');
        }
    }
    write_atomic(&config.output_dir.join("depth_diag.txt"), table.as_bytes())
        .map_err(CliError::Config)?;
    write_atomic(&config.output_dir.join("depth_diag.jsonl"), jsonl.as_bytes())
        .map_err(CliError::Config)?;
    Ok(())
}

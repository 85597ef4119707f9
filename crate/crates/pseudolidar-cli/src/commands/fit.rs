//! `fit`: the heuristic frustum detector over converted clouds.

use std::time::Instant;

use anyhow::Context;
use rayon::prelude::*;

use pseudolidar::fitter::{exp0_detect, SizePriors};
use pseudolidar::kitti_io::{
    parse_calibration, parse_labels, read_pointcloud_bin, serialize_labels,
};

use crate::config::RunConfig;
use crate::dataset;
use crate::CliError;

use super::{finish_frames, read_bytes, read_text, worker_pool, write_atomic};

fn compute_priors(config: &RunConfig) -> anyhow::Result<SizePriors> {
    let split = config
        .fitter
        .priors_split
        .clone()
        .unwrap_or_else(|| config.split_file.clone());
    let frames = dataset::read_split(&split)?;
    let mut labels = Vec::new();
    for frame in &frames {
        let path = dataset::label_path(&config.dataset_root, frame);
        let text = read_text(&path)?;
        labels.extend(parse_labels(&text, false).with_context(|| path.display().to_string())?);
    }
    Ok(SizePriors::from_labels(&labels))
}

fn fit_frame(config: &RunConfig, priors: &SizePriors, frame: &str) -> anyhow::Result<usize> {
    let started = Instant::now();
    let calib = parse_calibration(&read_text(&dataset::calib_path(
        &config.dataset_root,
        frame,
    ))?)?;
    let gt = parse_labels(
        &read_text(&dataset::label_path(&config.dataset_root, frame))?,
        false,
    )?;
    let cloud = read_pointcloud_bin(&read_bytes(&dataset::cloud_path(
        &config.output_dir,
        frame,
    ))?)?;
    let detections = exp0_detect(&cloud, &gt, &calib, priors, &config.fitter_config())?;
    write_atomic(
        &dataset::detection_path(&config.output_dir.join("detections"), frame),
        serialize_labels(&detections).as_bytes(),
    )?;
    log::info!(
        "frame={frame} stage=fit duration_ms={} gt={} detections={}",
        started.elapsed().as_millis(),
        gt.len(),
        detections.len()
    );
    Ok(detections.len())
}

pub fn run(config: &RunConfig, tolerate: bool) -> Result<(), CliError> {
    let frames = dataset::read_split(&config.split_file).map_err(CliError::Config)?;
    let priors = compute_priors(config).map_err(CliError::Config)?;
    let pool = worker_pool(config)?;
    let results: Vec<(String, anyhow::Result<usize>)> = pool.install(|| {
        frames
            .par_iter()
            .map(|frame| (frame.clone(), fit_frame(config, &priors, frame)))
            .collect()
    });
    let failures = results
        .into_iter()
        .filter_map(|(frame, r)| r.err().map(|e| (frame, format!("{e:#}"))))
        .collect();
    finish_frames(failures, frames.len(), tolerate)
}

//! `convert`: depth rasters to pseudo-LiDAR `.bin` files plus a manifest.

use std::time::Instant;

use rayon::prelude::*;

use pseudolidar::cloud::{build_pseudolidar_with_stats, ChannelMode, FrameManifest, SamplingMode};
use pseudolidar::kitti_io::{
    parse_calibration, read_confidence_png, read_depth_png, read_image_png, rgb_to_grayscale,
    write_pointcloud_bin, ScalarRaster,
};

use crate::config::RunConfig;
use crate::dataset;
use crate::CliError;

use super::{finish_frames, read_bytes, read_text, worker_pool, write_atomic};

fn load_feature(config: &RunConfig, frame: &str) -> anyhow::Result<Option<ScalarRaster>> {
    let channel = config.channel_mode()?;
    let sampling = config.sampling_mode()?;
    let needs_confidence =
        channel == ChannelMode::MaskConfidence || sampling == SamplingMode::MaskGuided;
    if needs_confidence {
        let bytes = read_bytes(&dataset::confidence_path(&config.dataset_root, frame))?;
        return Ok(Some(read_confidence_png(&bytes)?));
    }
    if channel == ChannelMode::Grayscale {
        let bytes = read_bytes(&dataset::image_path(&config.dataset_root, frame))?;
        let image = read_image_png(&bytes)?;
        return Ok(Some(rgb_to_grayscale(&image)?));
    }
    Ok(None)
}

fn convert_frame(config: &RunConfig, frame: &str) -> anyhow::Result<FrameManifest> {
    let started = Instant::now();
    let calib = parse_calibration(&read_text(&dataset::calib_path(
        &config.dataset_root,
        frame,
    ))?)?;
    let depth = read_depth_png(&read_bytes(&dataset::depth_path(
        &config.dataset_root,
        frame,
    ))?)?;
    let feature = load_feature(config, frame)?;
    let cfg = config.variant_config(config.frame_seed(frame))?;
    let (cloud, stats) = build_pseudolidar_with_stats(&depth, feature.as_ref(), &calib, &cfg)?;
    write_atomic(
        &dataset::cloud_path(&config.output_dir, frame),
        &write_pointcloud_bin(&cloud),
    )?;
    log::info!(
        "frame={frame} stage=convert duration_ms={} pixels_valid={} points={}",
        started.elapsed().as_millis(),
        stats.pixels_valid,
        stats.output_points
    );
    Ok(FrameManifest {
        frame_id: frame.to_string(),
        variant: config.variant.name.clone(),
        seed: cfg.seed,
        pixels_total: stats.pixels_total,
        pixels_valid: stats.pixels_valid,
        output_points: stats.output_points,
    })
}

pub fn run(config: &RunConfig, tolerate: bool) -> Result<(), CliError> {
    let frames = dataset::read_split(&config.split_file).map_err(CliError::Config)?;
    let pool = worker_pool(config)?;
    let results: Vec<(String, anyhow::Result<FrameManifest>)> = pool.install(|| {
        frames
            .par_iter()
            .map(|frame| (frame.clone(), convert_frame(config, frame)))
            .collect()
    });

    let mut manifest_lines = Vec::new();
    let mut failures = Vec::new();
    for (frame, result) in results {
        match result {
            Ok(entry) => manifest_lines.push(entry),
            Err(e) => failures.push((frame, format!("{e:#}"))),
        }
    }
    manifest_lines.sort_by(|a, b| a.frame_id.cmp(&b.frame_id));
    let mut jsonl = String::new();
    for entry in &manifest_lines {
        jsonl.push_str(&serde_json::to_string(entry).expect("manifest serializes"));
        jsonl.push('\n');
    }
    write_atomic(&config.output_dir.join("manifest.jsonl"), jsonl.as_bytes())
        .map_err(CliError::Config)?;

    finish_frames(failures, frames.len(), tolerate)
}

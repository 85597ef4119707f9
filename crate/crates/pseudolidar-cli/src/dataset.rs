//! KITTI-object directory layout and split handling.
//!
//! The dataset root mirrors the KITTI object benchmark (`image_2/`,
//! `calib/`, `label_2/`) extended with `depth/` and `conf/` rasters; the
//! output directory holds `velodyne_pseudo/`, `detections/`, the manifest,
//! and the report files.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

pub fn read_split(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading split file {}", path.display()))?;
    let mut frames = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let id = line.trim();
        if id.is_empty() {
            continue;
        }
        if id.len() != 6 || !id.bytes().all(|b| b.is_ascii_digit()) {
            bail!(
                "{}:{}: frame id `{id}` is not a zero-padded 6-digit string",
                path.display(),
                i + 1
            );
        }
        frames.push(id.to_string());
    }
    if frames.is_empty() {
        bail!("split file {} lists no frames", path.display());
    }
    Ok(frames)
}

pub fn calib_path(root: &Path, frame: &str) -> PathBuf {
    root.join("calib").join(format!("{frame}.txt"))
}

pub fn label_path(root: &Path, frame: &str) -> PathBuf {
    root.join("label_2").join(format!("{frame}.txt"))
}

pub fn image_path(root: &Path, frame: &str) -> PathBuf {
    root.join("image_2").join(format!("{frame}.png"))
}

pub fn depth_path(root: &Path, frame: &str) -> PathBuf {
    root.join("depth").join(format!("{frame}.png"))
}

pub fn confidence_path(root: &Path, frame: &str) -> PathBuf {
    root.join("conf").join(format!("{frame}.png"))
}

pub fn cloud_path(out: &Path, frame: &str) -> PathBuf {
    out.join("velodyne_pseudo").join(format!("{frame}.bin"))
}

pub fn detection_path(det_dir: &Path, frame: &str) -> PathBuf {
    det_dir.join(format!("{frame}.txt"))
}

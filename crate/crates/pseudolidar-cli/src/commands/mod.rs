pub mod convert;
pub mod depth_diag;
pub mod eval;
pub mod fit;
pub mod selftest;

use std::path::Path;

use anyhow::{Context, Result};

use crate::config::RunConfig;
use crate::CliError;

/// Builds the configured rayon pool for frame fan-out.
pub fn worker_pool(config: &RunConfig) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| CliError::Config(anyhow::anyhow!("building worker pool: {e}")))
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("reading {}", path.display()))
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))?;
    }
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}

/// Collects per-frame failures into the exit policy: every failure is
/// logged; without the tolerate flag any failure aborts with exit code 2.
pub fn finish_frames(
    failures: Vec<(String, String)>,
    total: usize,
    tolerate: bool,
) -> Result<(), CliError> {
    if failures.is_empty() {
        return Ok(());
    }
    for (frame, error) in &failures {
        log::error!("frame={frame} {error}");
    }
    log::warn!("{} of {total} frames failed", failures.len());
    if tolerate {
        Ok(())
    } else {
        Err(CliError::FrameFailures(failures.len()))
    }
}

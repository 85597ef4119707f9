//! Declarative run configuration: a TOML file plus CLI-flag overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use pseudolidar::cloud::{ChannelMode, SamplingMode, VariantConfig};
use pseudolidar::fitter::{ClusterSelection, FitterConfig};
use pseudolidar::kitti_io::ClassName;
use pseudolidar::metrics::DontCareMode;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dataset_root: PathBuf,
    pub split_file: PathBuf,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub global_seed: u64,
    /// Worker threads for frame fan-out; 0 picks the rayon default.
    #[serde(default)]
    pub jobs: usize,
    #[serde(default)]
    pub variant: VariantSection,
    #[serde(default)]
    pub fitter: FitterSection,
    #[serde(default)]
    pub eval: EvalSection,
    #[serde(default)]
    pub depth_diag: DepthDiagSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantSection {
    /// exp2 | exp4 | exp5 | exp7
    #[serde(default = "default_variant_name")]
    pub name: String,
    #[serde(default)]
    pub num_points: Option<usize>,
    #[serde(default)]
    pub depth_min: Option<f64>,
    #[serde(default)]
    pub depth_max: Option<f64>,
    #[serde(default)]
    pub mask_threshold: Option<f64>,
}

fn default_variant_name() -> String {
    "exp2".into()
}

impl Default for VariantSection {
    fn default() -> Self {
        Self {
            name: "exp2".into(),
            num_points: None,
            depth_min: None,
            depth_max: None,
            mask_threshold: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitterSection {
    #[serde(default = "default_cluster_epsilon")]
    pub cluster_epsilon: f64,
    #[serde(default = "default_cluster_min_points")]
    pub cluster_min_points: usize,
    #[serde(default = "default_min_frustum_points")]
    pub min_frustum_points: usize,
    #[serde(default = "default_cluster_selection")]
    pub cluster_selection: ClusterSelection,
    /// Split whose labels feed the size priors; defaults to `split_file`.
    #[serde(default)]
    pub priors_split: Option<PathBuf>,
}

fn default_cluster_epsilon() -> f64 {
    FitterConfig::default().cluster_epsilon
}

fn default_cluster_min_points() -> usize {
    FitterConfig::default().cluster_min_points
}

fn default_min_frustum_points() -> usize {
    FitterConfig::default().min_frustum_points
}

fn default_cluster_selection() -> ClusterSelection {
    FitterConfig::default().cluster_selection
}

impl Default for FitterSection {
    fn default() -> Self {
        let d = FitterConfig::default();
        Self {
            cluster_epsilon: d.cluster_epsilon,
            cluster_min_points: d.cluster_min_points,
            min_frustum_points: d.min_frustum_points,
            cluster_selection: d.cluster_selection,
            priors_split: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSection {
    #[serde(default = "default_classes")]
    pub classes: Vec<ClassName>,
    #[serde(default = "default_iou_thresholds")]
    pub iou_thresholds: Vec<f64>,
    #[serde(default = "default_dontcare_mode")]
    pub dontcare_mode: DontCareMode,
    /// Detection files to evaluate; defaults to `<output_dir>/detections`.
    #[serde(default)]
    pub detections_dir: Option<PathBuf>,
}

fn default_classes() -> Vec<ClassName> {
    vec![ClassName::Car]
}

fn default_iou_thresholds() -> Vec<f64> {
    vec![0.5, 0.7]
}

fn default_dontcare_mode() -> DontCareMode {
    DontCareMode::Official
}

impl Default for EvalSection {
    fn default() -> Self {
        Self {
            classes: vec![ClassName::Car],
            iou_thresholds: vec![0.5, 0.7],
            dontcare_mode: DontCareMode::Official,
            detections_dir: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepthDiagSection {
    #[serde(default = "default_diag_threshold")]
    pub threshold_m: f64,
    #[serde(default = "default_diag_buckets")]
    pub buckets: Vec<f64>,
}

fn default_diag_threshold() -> f64 {
    1.5
}

fn default_diag_buckets() -> Vec<f64> {
    vec![20.0, 40.0, 80.0]
}

impl Default for DepthDiagSection {
    fn default() -> Self {
        Self {
            threshold_m: 1.5,
            buckets: vec![20.0, 40.0, 80.0],
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: RunConfig = toml::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.dataset_root.is_dir() {
            bail!("dataset_root {} is not a directory", self.dataset_root.display());
        }
        if !self.split_file.is_file() {
            bail!("split_file {} does not exist", self.split_file.display());
        }
        self.variant_config(0).context("variant section")?;
        Ok(())
    }

    /// The cloud-builder config for one frame (the seed already mixed).
    pub fn variant_config(&self, frame_seed: u64) -> Result<VariantConfig> {
        let mut cfg = match self.variant.name.as_str() {
            "exp2" => VariantConfig::exp2(frame_seed),
            "exp4" => VariantConfig::exp4(frame_seed),
            "exp5" => VariantConfig::exp5(frame_seed),
            "exp7" => VariantConfig::exp7(frame_seed),
            other => bail!("unknown variant `{other}` (expected exp2|exp4|exp5|exp7)"),
        };
        if let Some(n) = self.variant.num_points {
            cfg.num_points = n;
        }
        if let Some(v) = self.variant.depth_min {
            cfg.depth_min = v;
        }
        if let Some(v) = self.variant.depth_max {
            cfg.depth_max = v;
        }
        if let Some(v) = self.variant.mask_threshold {
            cfg.mask_threshold = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn channel_mode(&self) -> Result<ChannelMode> {
        Ok(self.variant_config(0)?.channel_mode)
    }

    pub fn sampling_mode(&self) -> Result<SamplingMode> {
        Ok(self.variant_config(0)?.sampling_mode)
    }

    pub fn fitter_config(&self) -> FitterConfig {
        FitterConfig {
            cluster_epsilon: self.fitter.cluster_epsilon,
            cluster_min_points: self.fitter.cluster_min_points,
            min_frustum_points: self.fitter.min_frustum_points,
            cluster_selection: self.fitter.cluster_selection,
        }
    }

    /// Per-frame sampling seed: the global seed mixed with the frame id, so
    /// a frame's output does not depend on the batch composition.
    pub fn frame_seed(&self, frame_id: &str) -> u64 {
        let id: u64 = frame_id.parse().unwrap_or_else(|_| {
            // Non-numeric ids still get a stable per-frame value.
            frame_id.bytes().fold(0u64, |h, b| h.wrapping_mul(131).wrapping_add(b as u64))
        });
        self.global_seed ^ id
    }

    /// Stable hash of the resolved configuration, stamped into reports.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        hex[..12].to_string()
    }
}

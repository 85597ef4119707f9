//! KITTI-style evaluation: difficulty bucketing, AP40 in BEV and 3D at
//! IoU 0.5/0.7, and the depth-accuracy-versus-distance diagnostic.

mod ap;
mod depth_diag;
mod difficulty;
mod report;

pub use ap::{ap40, Ap40Result, DontCareMode, FramePair, OverlapMetric};
pub use depth_diag::{
    depth_diagnostic, DepthDiagAccumulator, DepthDiagCell, DepthDiagConfig, DepthDiagReport,
    DIAG_CLASSES,
};
pub use difficulty::{assign_difficulty, Difficulty, DifficultyCriteria, DifficultyRule};
pub use report::{evaluate, ClassEval, DifficultyEval, EvalOptions, EvalReport, ThresholdEval};

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::kitti_io::ClassName;

#[derive(Debug, Error)]
pub enum MetricsError {
    /// The (class, difficulty) slice has no ground truth at all; AP is
    /// undefined and reported as absent, not zero.
    #[error("no ground truth for {class} at {difficulty:?}")]
    NoGroundTruth {
        class: ClassName,
        difficulty: Difficulty,
    },
    #[error("detection without a score (frame index {frame})")]
    MissingScore { frame: usize },
    #[error("invalid difficulty criteria: {0}")]
    InvalidCriteria(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

//! Pseudo-LiDAR toolkit for KITTI-style monocular 3D detection pipelines.
//!
//! The crate covers the non-neural parts of such a pipeline:
//!
//! - [`kitti_io`] — parsers and serializers for KITTI calibration, label,
//!   depth/confidence PNG, and point-cloud `.bin` files.
//! - [`geometry`] — camera/Velodyne transforms, unprojection, oriented 3D
//!   boxes, and rotated-box IoU in bird's-eye view and 3D.
//! - [`cloud`] — pseudo-LiDAR construction from dense depth maps, including
//!   the intensity-channel and sampling variants.
//! - [`fitter`] — the heuristic frustum-based box fitter (clustering, PCA
//!   yaw, class size priors) driven by ground-truth 2D boxes.
//! - [`metrics`] — AP40 evaluation in BEV/3D at IoU 0.5 and 0.7 with KITTI
//!   difficulty buckets, plus the depth-accuracy-vs-distance diagnostic.
//! - [`selftest`] — independent oracles (Monte-Carlo IoU, brute-force AP,
//!   synthetic scenes) used by the test suites and the `selftest` CLI
//!   command.
//!
//! All operations are pure functions of their inputs; every type is
//! immutable after construction and safe to share across threads.

pub mod cloud;
pub mod fitter;
pub mod geometry;
pub mod kitti_io;
pub mod metrics;
pub mod selftest;

pub use geometry::{Box3D, CloudPoint, Frame, PointCloud};
pub use kitti_io::{Calibration, ClassName, LabelRecord, RasterKind, ScalarRaster};

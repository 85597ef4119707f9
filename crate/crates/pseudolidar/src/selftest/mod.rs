//! Independent oracles and synthetic scenes backing the test suites and the
//! `selftest` CLI command.
//!
//! Nothing here shares an algorithm with the production paths it checks:
//! IoU is re-derived by Monte-Carlo point inclusion, AP40 by a brute-force
//! re-matching sweep, and the fitter by scenes with known ground truth.

mod checks;
mod mc_iou;
mod ref_ap;
mod scenes;

pub use checks::{
    check_analytic_fixtures, check_ap_reference, check_cloud_variants, check_depth_diag,
    check_fitter_scene, check_format_round_trips, check_iou_monte_carlo,
    check_transform_round_trip, run_all, CheckOutcome, SelftestProfile,
};
pub use mc_iou::{monte_carlo_iou_3d, monte_carlo_iou_bev, random_box_pair};
pub use ref_ap::{reference_ap40, RefAp};
pub use scenes::{
    random_calibration, random_eval_scenes, synthetic_cluster_scene, synthetic_depth_scene,
    DepthScene, FitterScene,
};

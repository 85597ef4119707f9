//! The oracle check suite shared by the `selftest` CLI command and the
//! acceptance tests.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cloud::{build_pseudolidar, build_pseudolidar_with_stats, VariantConfig};
use crate::fitter::{exp0_detect, pca_yaw, FitterConfig};
use crate::geometry::{
    box_corners_bev, cam_to_velo, convex_polygon_intersection_area, iou_3d, iou_bev, velo_to_cam,
    Box3D, CloudPoint, Frame, PointCloud,
};
use crate::kitti_io::{
    parse_calibration, parse_labels, read_depth_png, read_pointcloud_bin, serialize_calibration,
    serialize_labels, write_depth_png, write_pointcloud_bin, ClassName, RasterKind, ScalarRaster,
};
use crate::metrics::{
    ap40, depth_diagnostic, DepthDiagConfig, Difficulty, DifficultyCriteria, DontCareMode,
    FramePair, OverlapMetric,
};

use super::mc_iou::{monte_carlo_iou_3d, monte_carlo_iou_bev, random_box_pair};
use super::ref_ap::reference_ap40;
use super::scenes::{
    random_calibration, random_eval_scenes, synthetic_cluster_scene, synthetic_depth_scene,
};

/// Check sizes: `Quick` for an interactive smoke run, `Full` for the
/// acceptance-grade sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelftestProfile {
    Quick,
    Full,
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }
}

/// Monte-Carlo IoU oracle agreement over seeded random box pairs. The 2e-3
/// tolerance belongs to the full 1e6-sample oracle; smaller sample counts
/// widen it by the binomial scaling.
pub fn check_iou_monte_carlo(pairs: usize, samples: usize) -> CheckOutcome {
    let tolerance = 2e-3 * (1_000_000.0 / samples as f64).sqrt().max(1.0);
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xB0C5);
    let boxes: Vec<(Box3D, Box3D)> = (0..pairs).map(|_| random_box_pair(&mut rng)).collect();
    let worst = boxes
        .par_iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let bev_exact = iou_bev(a, b).unwrap();
            let bev_mc = monte_carlo_iou_bev(a, b, samples, 10_000 + i as u64);
            let full_exact = iou_3d(a, b).unwrap();
            let full_mc = monte_carlo_iou_3d(a, b, samples, 20_000 + i as u64);
            (bev_exact - bev_mc).abs().max((full_exact - full_mc).abs())
        })
        .reduce(|| 0.0, f64::max);
    let elapsed = start.elapsed();
    CheckOutcome::new(
        "iou-monte-carlo",
        worst < tolerance && elapsed.as_secs() < 60,
        format!(
            "{pairs} pairs x {samples} samples: max |exact - mc| = {worst:.2e} (tol {tolerance:.1e}) in {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

/// The two closed-form IoU fixtures.
pub fn check_analytic_fixtures() -> CheckOutcome {
    // Unit square vs itself rotated 45 degrees: octagon area 2(sqrt(2)-1).
    let square = [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let diamond = [[h, 0.0], [0.0, h], [-h, 0.0], [0.0, -h]];
    let octagon = convex_polygon_intersection_area(&square, &diamond).unwrap();
    let octagon_expected = 2.0 * (std::f64::consts::SQRT_2 - 1.0);
    let err_octagon = (octagon - octagon_expected).abs();

    // Same squares as boxes through the BEV corner path.
    let sq_box = Box3D::new(Frame::Velodyne, (0.0, 0.0, 0.0), (1.0, 1.0, 1.0), 0.0).unwrap();
    let rot_box = Box3D::new(
        Frame::Velodyne,
        (0.0, 0.0, 0.0),
        (1.0, 1.0, 1.0),
        std::f64::consts::FRAC_PI_4,
    )
    .unwrap();
    let via_boxes =
        convex_polygon_intersection_area(&box_corners_bev(&sq_box), &box_corners_bev(&rot_box))
            .unwrap();
    let err_boxes = (via_boxes - octagon_expected).abs();

    // Identical footprints offset by half a height: 3D IoU = 1/3.
    let a = Box3D::new(Frame::Velodyne, (0.0, 0.0, 0.0), (4.0, 2.0, 1.0), 0.3).unwrap();
    let b = Box3D::new(Frame::Velodyne, (0.0, 0.0, 0.5), (4.0, 2.0, 1.0), 0.3).unwrap();
    let err_third = (iou_3d(&a, &b).unwrap() - 1.0 / 3.0).abs();

    CheckOutcome::new(
        "analytic-iou-fixtures",
        err_octagon < 1e-6 && err_boxes < 1e-6 && err_third < 1e-9,
        format!(
            "octagon err {err_octagon:.2e} (via boxes {err_boxes:.2e}), half-height err {err_third:.2e}"
        ),
    )
}

/// Production AP40 against the brute-force reference on random scenes, plus
/// the perfect-detection and score-monotone invariants.
pub fn check_ap_reference(scene_count: usize) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA940_5EED);
    let scenes = random_eval_scenes(&mut rng, scene_count);
    let criteria = DifficultyCriteria::kitti();
    let mut worst: f64 = 0.0;
    let mut cells = 0usize;

    for scene in &scenes {
        for dontcare in [DontCareMode::Official, DontCareMode::Simple] {
            for difficulty in Difficulty::ALL {
                for threshold in [0.5, 0.7] {
                    for metric in [OverlapMetric::Bev, OverlapMetric::Iou3d] {
                        let prod = ap40(
                            scene,
                            ClassName::Car,
                            difficulty,
                            threshold,
                            metric,
                            &criteria,
                            dontcare,
                        );
                        let reference = reference_ap40(
                            scene,
                            ClassName::Car,
                            difficulty,
                            threshold,
                            metric,
                            &criteria,
                            dontcare,
                        );
                        match (prod, reference) {
                            (Ok(p), Some(r)) => {
                                worst = worst.max((p.ap_percent - r.ap_percent).abs());
                                for (a, b) in
                                    p.precision_at_recall.iter().zip(&r.precision_at_recall)
                                {
                                    worst = worst.max((a - b).abs() * 100.0);
                                }
                                cells += 1;
                            }
                            (Err(_), None) => {}
                            (p, r) => {
                                return CheckOutcome::new(
                                    "ap40-reference",
                                    false,
                                    format!("definedness mismatch: {p:?} vs {r:?}"),
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    // Perfect detections score exactly 100 in every defined cell.
    let mut perfect_ok = true;
    for scene in scenes.iter().take(10) {
        let perfect: Vec<FramePair> = scene
            .iter()
            .map(|f| FramePair {
                gt: f.gt.clone(),
                det: f
                    .gt
                    .iter()
                    .filter(|g| g.class_name != ClassName::DontCare)
                    .map(|g| {
                        let mut d = g.clone();
                        d.score = Some(1.0);
                        d
                    })
                    .collect(),
            })
            .collect();
        for difficulty in Difficulty::ALL {
            if let Ok(r) = ap40(
                &perfect,
                ClassName::Car,
                difficulty,
                0.7,
                OverlapMetric::Iou3d,
                &criteria,
                DontCareMode::Official,
            ) {
                perfect_ok &= r.ap_percent == 100.0;
            }
        }
    }

    // A strictly increasing score rescale changes nothing.
    let mut monotone_ok = true;
    for scene in scenes.iter().take(20) {
        let rescaled: Vec<FramePair> = scene
            .iter()
            .map(|f| FramePair {
                gt: f.gt.clone(),
                det: f
                    .det
                    .iter()
                    .map(|d| {
                        let mut d = d.clone();
                        d.score = d.score.map(|s| 0.05 + 0.9 * s * s);
                        d
                    })
                    .collect(),
            })
            .collect();
        for (frames, other) in [(scene, &rescaled)] {
            for metric in [OverlapMetric::Bev, OverlapMetric::Iou3d] {
                let a = ap40(
                    frames,
                    ClassName::Car,
                    Difficulty::Moderate,
                    0.5,
                    metric,
                    &criteria,
                    DontCareMode::Official,
                );
                let b = ap40(
                    other,
                    ClassName::Car,
                    Difficulty::Moderate,
                    0.5,
                    metric,
                    &criteria,
                    DontCareMode::Official,
                );
                match (a, b) {
                    (Ok(a), Ok(b)) => monotone_ok &= a.ap_percent == b.ap_percent,
                    (Err(_), Err(_)) => {}
                    _ => monotone_ok = false,
                }
            }
        }
    }

    CheckOutcome::new(
        "ap40-reference",
        worst < 1e-9 && perfect_ok && monotone_ok && cells > 0,
        format!(
            "{cells} defined cells over {scene_count} scenes: max |prod - ref| = {worst:.2e}, \
             perfect=100 {perfect_ok}, score-monotone {monotone_ok}"
        ),
    )
}

/// Pseudo-LiDAR construction invariants on a synthetic raster.
pub fn check_cloud_variants(profile: SelftestProfile) -> CheckOutcome {
    let (w, h) = match profile {
        SelftestProfile::Quick => (120, 90),
        SelftestProfile::Full => (400, 160),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0xC10D);
    // Depth values straddle the validity range, including exact bounds.
    let values: Vec<f32> = (0..w * h)
        .map(|i| match i % 11 {
            0 => 0.0,
            1 => 1.0,
            2 => 60.0,
            3 => rng.random_range(60.0..90.0),
            _ => rng.random_range(1.0001..59.999),
        })
        .collect();
    let expected_valid = values.iter().filter(|&&d| d > 1.0 && d < 60.0).count();
    let depth = ScalarRaster::new(w, h, RasterKind::DepthMeters, values).unwrap();
    let gray = ScalarRaster::new(
        w,
        h,
        RasterKind::Grayscale01,
        (0..w * h).map(|i| (i % 251) as f32 / 250.0).collect(),
    )
    .unwrap();
    let conf = ScalarRaster::new(
        w,
        h,
        RasterKind::Confidence01,
        (0..w * h).map(|i| ((i * 7) % 100) as f32 / 100.0).collect(),
    )
    .unwrap();
    let calib = super::scenes::permutation_calibration();

    let seed = 2024;
    let (budget_full, budget_dense) = match profile {
        SelftestProfile::Quick => (4096, 10_000),
        SelftestProfile::Full => (16_384, 40_000),
    };
    let mut cfg2 = VariantConfig::exp2(seed);
    cfg2.num_points = budget_full;
    let mut cfg4 = VariantConfig::exp4(seed);
    cfg4.num_points = budget_full;
    let mut cfg5 = VariantConfig::exp5(seed);
    cfg5.num_points = budget_dense;
    let mut cfg7 = VariantConfig::exp7(seed);
    cfg7.num_points = budget_full;

    let (c2, stats) = build_pseudolidar_with_stats(&depth, Some(&gray), &calib, &cfg2).unwrap();
    let c4 = build_pseudolidar(&depth, Some(&conf), &calib, &cfg4).unwrap();
    let c5 = build_pseudolidar(&depth, Some(&conf), &calib, &cfg5).unwrap();
    let c7 = build_pseudolidar(&depth, None, &calib, &cfg7).unwrap();

    let filter_ok = stats.pixels_valid == expected_valid;
    let budgets_ok = c2.len() == budget_full
        && c4.len() == budget_full
        && c5.len() == budget_dense
        && c7.len() == budget_full;
    let coords_ok = c2
        .points()
        .iter()
        .zip(c7.points())
        .all(|(a, b)| a.x.to_bits() == b.x.to_bits() && a.y.to_bits() == b.y.to_bits() && a.z.to_bits() == b.z.to_bits());
    let intensity_ok = [&c2, &c4, &c5, &c7]
        .iter()
        .all(|c| c.points().iter().all(|p| (0.0..=1.0).contains(&p.intensity)))
        && c7.points().iter().all(|p| p.intensity == 0.0);
    // Camera depth of every output point stays inside the validity range
    // (the exact permutation calibration makes z_cam = x_velo + 0.27).
    let depth_ok = [&c2, &c4, &c5, &c7].iter().all(|c| {
        velo_to_cam(c, &calib).unwrap().points().iter().all(|p| {
            let z = p.z as f64;
            z > 1.0 - 1e-3 && z < 60.0 + 1e-3
        })
    });
    let deterministic = {
        let again = build_pseudolidar(&depth, Some(&gray), &calib, &cfg2).unwrap();
        again == c2
    };

    CheckOutcome::new(
        "pseudolidar-variants",
        filter_ok && budgets_ok && coords_ok && intensity_ok && depth_ok && deterministic,
        format!(
            "valid {}/{} pixels, budgets {}/{}/{}/{}, exp2==exp7 coords {coords_ok}, \
             intensities-in-range {intensity_ok}, depth-range {depth_ok}, deterministic {deterministic}",
            stats.pixels_valid,
            w * h,
            c2.len(),
            c4.len(),
            c5.len(),
            c7.len()
        ),
    )
}

/// Velodyne/camera transform round trip over random calibrations.
pub fn check_transform_round_trip(calibs: usize, points: usize) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7124);
    let mut worst: f64 = 0.0;
    for _ in 0..calibs {
        let calib = random_calibration(&mut rng);
        let cloud = PointCloud::from_points(
            Frame::Velodyne,
            (0..points)
                .map(|_| {
                    CloudPoint::new(
                        rng.random_range(-80.0..80.0),
                        rng.random_range(-80.0..80.0),
                        rng.random_range(-5.0..5.0),
                        0.5,
                    )
                })
                .collect(),
        );
        let back = cam_to_velo(&velo_to_cam(&cloud, &calib).unwrap(), &calib).unwrap();
        for (a, b) in cloud.points().iter().zip(back.points()) {
            let d = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2) + (a.z - b.z).powi(2)).sqrt();
            worst = worst.max(d as f64);
        }
    }
    CheckOutcome::new(
        "transform-round-trip",
        worst < 1e-5,
        format!("{calibs} calibrations x {points} points: max deviation {worst:.2e} m"),
    )
}

/// The synthetic fitter scenes: cluster-level and depth-map-level recovery.
pub fn check_fitter_scene() -> CheckOutcome {
    // Cluster on a sparse ground plane, exact prior, no noise.
    let scene = synthetic_cluster_scene(31);
    let dets = exp0_detect(
        &scene.cloud,
        &[scene.gt_label.clone()],
        &scene.calib,
        &scene.priors,
        &FitterConfig::default(),
    )
    .unwrap();
    let cluster_iou = dets
        .first()
        .and_then(|d| {
            let det_box = Box3D::new(
                Frame::Camera,
                d.location,
                (d.dims.2, d.dims.1, d.dims.0),
                d.rotation_y,
            )
            .ok()?;
            let gt_box = Box3D::new(
                Frame::Camera,
                scene.gt_label.location,
                (
                    scene.gt_label.dims.2,
                    scene.gt_label.dims.1,
                    scene.gt_label.dims.0,
                ),
                scene.gt_label.rotation_y,
            )
            .ok()?;
            iou_3d(&det_box, &gt_box).ok()
        })
        .unwrap_or(0.0);

    // Rotated anisotropic Gaussian: principal-axis yaw within 0.02 rad.
    let mut rng = ChaCha8Rng::seed_from_u64(0x9A11);
    let (sin, cos) = 0.3f64.sin_cos();
    let normal = rand_distr_standard(&mut rng, 20_000);
    let points: Vec<[f64; 2]> = normal
        .chunks_exact(2)
        .map(|ab| {
            let a = 2.0 * ab[0];
            let b = 0.1 * ab[1];
            [a * cos - b * sin, a * sin + b * cos]
        })
        .collect();
    debug_assert_eq!(points.len(), 10_000);
    let yaw_err = (pca_yaw(&points).yaw - 0.3).abs();

    // Everything again, end to end from a ray-cast depth map; the denser
    // 40k budget keeps the frustum well populated under the full-scene
    // ground coverage.
    let depth_scene = synthetic_depth_scene();
    let mut cfg = VariantConfig::exp7(7);
    cfg.num_points = 40_000;
    let cloud = build_pseudolidar(&depth_scene.depth, None, &depth_scene.calib, &cfg).unwrap();
    let dets = exp0_detect(
        &cloud,
        &[depth_scene.gt_label.clone()],
        &depth_scene.calib,
        &depth_scene.priors,
        &FitterConfig::default(),
    )
    .unwrap();
    let depth_iou = dets
        .first()
        .and_then(|d| {
            let det_box = Box3D::new(
                Frame::Camera,
                d.location,
                (d.dims.2, d.dims.1, d.dims.0),
                d.rotation_y,
            )
            .ok()?;
            let gt_box = Box3D::new(
                Frame::Camera,
                depth_scene.gt_label.location,
                (
                    depth_scene.gt_label.dims.2,
                    depth_scene.gt_label.dims.1,
                    depth_scene.gt_label.dims.0,
                ),
                depth_scene.gt_label.rotation_y,
            )
            .ok()?;
            iou_3d(&det_box, &gt_box).ok()
        })
        .unwrap_or(0.0);

    CheckOutcome::new(
        "fitter-synthetic-scene",
        cluster_iou >= 0.7 && yaw_err <= 0.02 && depth_iou > 0.5,
        format!(
            "cluster-scene IoU3d {cluster_iou:.3} (>= 0.7), pca yaw err {yaw_err:.4} (<= 0.02), \
             depth-scene IoU3d {depth_iou:.3} (> 0.5)"
        ),
    )
}

// Standard normals via Box-Muller on the shared ChaCha stream.
fn rand_distr_standard(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let u1: f64 = rng.random_range(1e-12..1.0);
            let u2: f64 = rng.random_range(0.0..1.0);
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        })
        .collect()
}

/// Depth-diagnostic boundary and bucket semantics.
pub fn check_depth_diag() -> CheckOutcome {
    let label_at = |z: f64| crate::kitti_io::LabelRecord {
        class_name: ClassName::Car,
        truncation: 0.0,
        occlusion: 0,
        alpha: 0.0,
        bbox2d: crate::kitti_io::BBox2D {
            left: 4.0,
            top: 4.0,
            right: 28.0,
            bottom: 28.0,
        },
        dims: (1.5, 1.6, 3.9),
        location: (0.0, 1.5, z),
        rotation_y: 0.0,
        score: None,
    };
    let uniform = |d: f32| ScalarRaster::new(32, 32, RasterKind::DepthMeters, vec![d; 1024]).unwrap();

    // Exactly 1.5 m of error stays correct; a hair more does not.
    let boundary = depth_diagnostic(
        &[(vec![label_at(10.0)], uniform(11.5))],
        DepthDiagConfig::default(),
    );
    let boundary_ok = boundary.cell(ClassName::Car, 0).correct == 1;
    let over = depth_diagnostic(
        &[(vec![label_at(10.0)], uniform(11.502))],
        DepthDiagConfig::default(),
    );
    let over_ok = over.cell(ClassName::Car, 0).correct == 0;

    // Hand-computed accuracy table: z=10 ok, z=15 off, z=30 ok, z=50 off.
    let frames = vec![
        (vec![label_at(10.0)], uniform(10.4)),
        (vec![label_at(15.0)], uniform(18.0)),
        (vec![label_at(30.0)], uniform(29.0)),
        (vec![label_at(50.0)], uniform(0.0)), // no valid pixels: incorrect
    ];
    let report = depth_diagnostic(&frames, DepthDiagConfig::default());
    let c20 = report.cell(ClassName::Car, 0);
    let c40 = report.cell(ClassName::Car, 1);
    let c80 = report.cell(ClassName::Car, 2);
    let close = |got: Option<f64>, want: f64| got.is_some_and(|g| (g - want).abs() < 1e-9);
    let table_ok = close(c20.accuracy_percent(), 50.0)
        && c20.total == 2
        && close(c40.accuracy_percent(), 200.0 / 3.0)
        && c40.total == 3
        && close(c80.accuracy_percent(), 50.0)
        && c80.total == 4;
    let monotone_ok = c20.total <= c40.total && c40.total <= c80.total;

    CheckOutcome::new(
        "depth-diagnostic",
        boundary_ok && over_ok && table_ok && monotone_ok,
        format!(
            "boundary-inclusive {boundary_ok}, beyond-boundary-incorrect {over_ok}, \
             hand-table {table_ok}, cumulative {monotone_ok}"
        ),
    )
}

/// Randomized parser/serializer round trips.
pub fn check_format_round_trips(iterations: usize) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF0F0);
    let mut calib_worst: f64 = 0.0;
    let mut bin_ok = true;
    let mut png_ok = true;
    let mut label_worst: f64 = 0.0;

    for _ in 0..iterations {
        // Calibration text round trip.
        let calib = random_calibration(&mut rng);
        let back = parse_calibration(&serialize_calibration(&calib)).unwrap();
        calib_worst = calib_worst
            .max((calib.p2 - back.p2).abs().max())
            .max((calib.r0_rect - back.r0_rect).abs().max())
            .max((calib.tr_velo_to_cam - back.tr_velo_to_cam).abs().max());

        // Point cloud binary round trip, bit exact.
        let cloud = PointCloud::from_points(
            Frame::Velodyne,
            (0..rng.random_range(1..200))
                .map(|_| {
                    CloudPoint::new(
                        rng.random_range(-100.0..100.0),
                        rng.random_range(-100.0..100.0),
                        rng.random_range(-10.0..10.0),
                        rng.random_range(0.0..=1.0),
                    )
                })
                .collect(),
        );
        let back = read_pointcloud_bin(&write_pointcloud_bin(&cloud)).unwrap();
        bin_ok &= back == cloud
            && back
                .points()
                .iter()
                .zip(cloud.points())
                .all(|(a, b)| a.x.to_bits() == b.x.to_bits());

        // Depth PNG round trip, exact on the 1/256 grid.
        let w = rng.random_range(2..40);
        let h = rng.random_range(2..30);
        let raster = ScalarRaster::new(
            w,
            h,
            RasterKind::DepthMeters,
            (0..w * h)
                .map(|_| rng.random_range(0..65_535u32) as f32 / 256.0)
                .collect(),
        )
        .unwrap();
        png_ok &= read_depth_png(&write_depth_png(&raster).unwrap()).unwrap() == raster;

        // Label text round trip at 1e-6.
        let labels: Vec<_> = (0..rng.random_range(1..10))
            .map(|_| {
                let left = rng.random_range(0.0..1000.0);
                let top = rng.random_range(0.0..300.0);
                crate::kitti_io::LabelRecord {
                    class_name: ClassName::Car,
                    truncation: rng.random_range(0.0..1.0),
                    occlusion: rng.random_range(0..=3),
                    alpha: rng.random_range(-3.14..3.14),
                    bbox2d: crate::kitti_io::BBox2D {
                        left,
                        top,
                        right: left + rng.random_range(1.0..200.0),
                        bottom: top + rng.random_range(1.0..100.0),
                    },
                    dims: (
                        rng.random_range(0.5..3.0),
                        rng.random_range(0.5..3.0),
                        rng.random_range(0.5..6.0),
                    ),
                    location: (
                        rng.random_range(-40.0..40.0),
                        rng.random_range(-2.0..3.0),
                        rng.random_range(0.1..80.0),
                    ),
                    rotation_y: rng.random_range(-3.14..3.14),
                    score: Some(rng.random_range(0.0..=1.0)),
                }
            })
            .collect();
        let back = parse_labels(&serialize_labels(&labels), true).unwrap();
        for (a, b) in labels.iter().zip(&back) {
            label_worst = label_worst
                .max((a.location.0 - b.location.0).abs())
                .max((a.location.2 - b.location.2).abs())
                .max((a.rotation_y - b.rotation_y).abs())
                .max((a.score.unwrap() - b.score.unwrap()).abs());
        }
    }

    CheckOutcome::new(
        "format-round-trips",
        calib_worst < 1e-6 && bin_ok && png_ok && label_worst < 1e-6,
        format!(
            "calib max err {calib_worst:.2e}, bin bit-exact {bin_ok}, depth png exact {png_ok}, \
             label max err {label_worst:.2e} over {iterations} rounds"
        ),
    )
}

/// Runs every check at the profile's sizes.
pub fn run_all(profile: SelftestProfile) -> Vec<CheckOutcome> {
    let (pairs, samples) = match profile {
        SelftestProfile::Quick => (120, 100_000),
        SelftestProfile::Full => (1000, 1_000_000),
    };
    let scenes = match profile {
        SelftestProfile::Quick => 25,
        SelftestProfile::Full => 100,
    };
    let (calibs, points) = match profile {
        SelftestProfile::Quick => (10, 1000),
        SelftestProfile::Full => (10, 10_000),
    };
    let format_rounds = match profile {
        SelftestProfile::Quick => 20,
        SelftestProfile::Full => 60,
    };
    vec![
        check_analytic_fixtures(),
        check_iou_monte_carlo(pairs, samples),
        check_ap_reference(scenes),
        check_cloud_variants(profile),
        check_transform_round_trip(calibs, points),
        check_fitter_scene(),
        check_depth_diag(),
        check_format_round_trips(format_rounds),
    ]
}

//! Synthetic scenes with known ground truth.

use nalgebra::{Matrix3, Matrix3x4, Point3, Rotation3, Unit, Vector3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::fitter::SizePriors;
use crate::geometry::{box_velo_to_cam, Box3D, CloudPoint, Frame, PointCloud};
use crate::kitti_io::{BBox2D, Calibration, ClassName, LabelRecord, RasterKind, ScalarRaster};
use crate::metrics::FramePair;

/// A random but valid calibration: proper random extrinsic rotation, a
/// small rectification rotation, and plausible intrinsics.
pub fn random_calibration(rng: &mut ChaCha8Rng) -> Calibration {
    let fx = rng.random_range(400.0..900.0);
    let fy = rng.random_range(400.0..900.0);
    let cx = rng.random_range(500.0..700.0);
    let cy = rng.random_range(150.0..250.0);
    let p2 = Matrix3x4::from_row_slice(&[
        fx,
        0.0,
        cx,
        rng.random_range(-50.0..50.0),
        0.0,
        fy,
        cy,
        rng.random_range(-1.0..1.0),
        0.0,
        0.0,
        1.0,
        rng.random_range(-0.01..0.01),
    ]);
    let random_unit = |rng: &mut ChaCha8Rng| {
        Unit::new_normalize(Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0f64),
        ))
    };
    let r0: Matrix3<f64> = Rotation3::from_axis_angle(&random_unit(rng), rng.random_range(-0.05..0.05))
        .into_inner();
    let r_vc: Matrix3<f64> =
        Rotation3::from_axis_angle(&random_unit(rng), rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
            .into_inner();
    let t = Vector3::new(
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0f64),
    );
    let mut tr = Matrix3x4::zeros();
    tr.fixed_view_mut::<3, 3>(0, 0).copy_from(&r_vc);
    tr.set_column(3, &t);
    Calibration::new(p2, r0, tr).expect("proper rotations pass the checks")
}

fn random_car_gt(rng: &mut ChaCha8Rng, class: ClassName) -> LabelRecord {
    let left = rng.random_range(0.0..1100.0);
    let top = rng.random_range(0.0..300.0);
    let height = rng.random_range(15.0..80.0);
    LabelRecord {
        class_name: class,
        truncation: rng.random_range(0.0..0.6),
        occlusion: rng.random_range(0..=3),
        alpha: 0.0,
        bbox2d: BBox2D {
            left,
            top,
            right: left + rng.random_range(20.0..140.0),
            bottom: top + height,
        },
        dims: (
            rng.random_range(1.3..1.8),
            rng.random_range(1.5..1.8),
            rng.random_range(3.5..4.5),
        ),
        location: (
            rng.random_range(-15.0..15.0),
            rng.random_range(1.3..1.7),
            rng.random_range(5.0..50.0),
        ),
        rotation_y: rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
        score: None,
    }
}

/// Scores on a coarse grid so equal-score sweeps get exercised.
fn random_score(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(1..=19) as f64 * 0.05
}

fn perturbed_detection(rng: &mut ChaCha8Rng, gt: &LabelRecord) -> LabelRecord {
    let mut det = gt.clone();
    // Jitter tiers: exact, near, sloppy, wild.
    let sigma = [0.0, 0.15, 0.5, 1.6][rng.random_range(0..4)];
    det.location = (
        gt.location.0 + rng.random_range(-1.0..1.0) * sigma,
        gt.location.1 + rng.random_range(-1.0..1.0) * sigma * 0.3,
        gt.location.2 + rng.random_range(-1.0..1.0) * sigma,
    );
    det.rotation_y = crate::geometry::normalize_angle(
        gt.rotation_y + rng.random_range(-1.0..1.0) * sigma * 0.3,
    );
    let scale = 1.0 + rng.random_range(-0.1..0.1) * sigma.min(1.0);
    det.dims = (gt.dims.0 * scale, gt.dims.1 * scale, gt.dims.2 * scale);
    det.truncation = 0.0;
    det.occlusion = 0;
    det.score = Some(random_score(rng));
    det
}

/// Random evaluation scenes: each is a small frame set with ground truth of
/// mixed difficulty, perturbed/duplicate/false detections, score ties, and
/// occasional DontCare regions.
pub fn random_eval_scenes(rng: &mut ChaCha8Rng, count: usize) -> Vec<Vec<FramePair>> {
    (0..count)
        .map(|_| {
            let frames = rng.random_range(1..=4);
            let mut budget = 20usize;
            (0..frames)
                .map(|_| {
                    let mut gt = Vec::new();
                    let mut det = Vec::new();
                    let n_gt = rng.random_range(0..=5.min(budget));
                    budget -= n_gt;
                    for _ in 0..n_gt {
                        let class = if rng.random_bool(0.85) {
                            ClassName::Car
                        } else {
                            ClassName::Pedestrian
                        };
                        let g = random_car_gt(rng, class);
                        if rng.random_bool(0.85) {
                            det.push(perturbed_detection(rng, &g));
                        }
                        if rng.random_bool(0.2) {
                            det.push(perturbed_detection(rng, &g)); // double detection
                        }
                        gt.push(g);
                    }
                    if rng.random_bool(0.3) {
                        let mut dc = random_car_gt(rng, ClassName::DontCare);
                        dc.truncation = -1.0;
                        dc.occlusion = -1;
                        dc.dims = (-1.0, -1.0, -1.0);
                        dc.location = (-1000.0, -1000.0, -1000.0);
                        dc.rotation_y = -10.0;
                        gt.push(dc);
                    }
                    for _ in 0..rng.random_range(0..4) {
                        let mut fp = random_car_gt(rng, ClassName::Car);
                        fp.truncation = 0.0;
                        fp.occlusion = 0;
                        fp.score = Some(random_score(rng));
                        det.push(fp);
                    }
                    // Shuffle detection file order.
                    for i in (1..det.len()).rev() {
                        det.swap(i, rng.random_range(0..=i));
                    }
                    FramePair { gt, det }
                })
                .collect()
        })
        .collect()
}

/// The KITTI-style axis permutation: x_cam = -y_velo, y_cam = -z_velo,
/// z_cam = x_velo, with small camera offsets.
pub(crate) fn permutation_calibration() -> Calibration {
    crate::kitti_io::parse_calibration(
        "P2: 700 0 320 0 0 700 240 0 0 0 1 0\n\
         R0_rect: 1 0 0 0 1 0 0 0 1\n\
         Tr_velo_to_cam: 0 -1 0 0 0 0 -1 -0.08 1 0 0 -0.27\n",
    )
    .expect("static calibration")
}

/// A frustum-fitter scene: a dense car-sized cluster sitting on a sparse
/// ground plane, with the exact size prior and a camera-frame ground-truth
/// label.
pub struct FitterScene {
    pub cloud: PointCloud,
    pub calib: Calibration,
    pub gt_box_velo: Box3D,
    pub gt_label: LabelRecord,
    pub priors: SizePriors,
}

pub fn synthetic_cluster_scene(seed: u64) -> FitterScene {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let calib = permutation_calibration();

    let dims = (3.9, 1.6, 1.56); // (l, w, h)
    let yaw = 0.3;
    let ground_z = -1.73;
    let center = (12.0, 1.0, ground_z + dims.2 / 2.0);
    let gt_box_velo = Box3D::new(Frame::Velodyne, center, dims, yaw).unwrap();

    // Dense uniform fill of the box volume.
    let (sin, cos) = yaw.sin_cos();
    let mut points = Vec::with_capacity(3600);
    for _ in 0..3000 {
        let u = rng.random_range(-dims.0 / 2.0..dims.0 / 2.0);
        let v = rng.random_range(-dims.1 / 2.0..dims.1 / 2.0);
        let w = rng.random_range(0.0..dims.2);
        points.push(CloudPoint::new(
            (center.0 + u * cos - v * sin) as f32,
            (center.1 + u * sin + v * cos) as f32,
            (ground_z + w) as f32,
            0.0,
        ));
    }
    // Sparse ground lattice (0.7 m pitch, farther apart than the clustering
    // radius).
    let mut x = 4.0;
    while x < 24.0 {
        let mut y = -6.0;
        while y < 9.0 {
            points.push(CloudPoint::new(x as f32, y as f32, ground_z as f32, 0.0));
            y += 0.7;
        }
        x += 0.7;
    }
    let cloud = PointCloud::from_points(Frame::Velodyne, points);

    let bbox2d = project_box_bbox(&gt_box_velo, &calib);
    let cam_box = box_velo_to_cam(&gt_box_velo, &calib).unwrap();
    let gt_label = LabelRecord {
        class_name: ClassName::Car,
        truncation: 0.0,
        occlusion: 0,
        alpha: 0.0,
        bbox2d,
        dims: (dims.2, dims.1, dims.0),
        location: (cam_box.center().x, cam_box.center().y, cam_box.center().z),
        rotation_y: cam_box.yaw(),
        score: None,
    };
    let priors = SizePriors::from_labels(&[gt_label.clone()]);

    FitterScene {
        cloud,
        calib,
        gt_box_velo,
        gt_label,
        priors,
    }
}

/// Image-plane bounding box of a Velodyne box's eight corners.
fn project_box_bbox(b: &Box3D, calib: &Calibration) -> BBox2D {
    let to_cam = crate::geometry::velo_to_cam_transform(calib);
    let (l, w, h) = b.dims();
    let (sin, cos) = b.yaw().sin_cos();
    let c = b.center();
    let mut bbox = BBox2D {
        left: f64::INFINITY,
        top: f64::INFINITY,
        right: f64::NEG_INFINITY,
        bottom: f64::NEG_INFINITY,
    };
    for sx in [-0.5, 0.5] {
        for sy in [-0.5, 0.5] {
            for sz in [-0.5, 0.5] {
                let (u, v, z) = (sx * l, sy * w, sz * h);
                let p = Point3::new(c.x + u * cos - v * sin, c.y + u * sin + v * cos, c.z + z);
                let q = to_cam.apply(&p);
                let (pu, pv) = crate::geometry::project_to_image(&q, calib).expect("in front");
                bbox.left = bbox.left.min(pu);
                bbox.right = bbox.right.max(pu);
                bbox.top = bbox.top.min(pv);
                bbox.bottom = bbox.bottom.max(pv);
            }
        }
    }
    bbox.left -= 2.0;
    bbox.top -= 2.0;
    bbox.right += 2.0;
    bbox.bottom += 2.0;
    bbox
}

/// A ray-cast depth map of a single boxy car on a ground plane, seen from
/// above and behind.
pub struct DepthScene {
    pub depth: ScalarRaster,
    pub calib: Calibration,
    pub gt_label: LabelRecord,
    pub priors: SizePriors,
}

pub fn synthetic_depth_scene() -> DepthScene {
    let calib = permutation_calibration();
    let width = 640usize;
    let height = 1280usize; // tall frame: the ground contact stays in view

    // Camera-frame car: volume center, KITTI yaw about the (downward) y
    // axis. Seen end-on from a high vantage point: the roof anchors the
    // cluster centroid on the footprint, the visible rear face pulls only
    // along the forgiving length axis, and the ground ring inside the 2D
    // box pins the bottom percentile.
    let dims = (3.9, 1.6, 1.56); // (l, w, h)
    let ry = -1.54f64;
    let ground_y = 14.0;
    let center = Point3::new(0.5, ground_y - dims.2 / 2.0, 15.0);

    let (sin, cos) = ry.sin_cos();
    // Object->camera rotation about y; its transpose maps rays into the
    // object frame where the box is an axis-aligned slab.
    let to_object = |p: &Vector3<f64>| {
        Vector3::new(cos * p.x - sin * p.z, p.y, sin * p.x + cos * p.z)
    };
    let origin_obj = to_object(&(-center.coords));
    let half = Vector3::new(dims.0 / 2.0, dims.2 / 2.0, dims.1 / 2.0);

    let mut values = vec![0.0f32; width * height];
    for v in 0..height {
        for u in 0..width {
            let dir = Vector3::new(
                (u as f64 - calib.cx) / calib.fx,
                (v as f64 - calib.cy) / calib.fy,
                1.0,
            );
            let d_obj = to_object(&dir);
            // Slab intersection.
            let mut t_near = f64::NEG_INFINITY;
            let mut t_far = f64::INFINITY;
            let mut hit = true;
            for axis in 0..3 {
                let o = origin_obj[axis];
                let d = d_obj[axis];
                if d.abs() < 1e-12 {
                    if o.abs() > half[axis] {
                        hit = false;
                        break;
                    }
                    continue;
                }
                let t0 = (-half[axis] - o) / d;
                let t1 = (half[axis] - o) / d;
                let (t0, t1) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
                t_near = t_near.max(t0);
                t_far = t_far.min(t1);
            }
            // dir.z == 1, so the ray parameter is the camera depth.
            let mut depth_hit = if hit && t_near <= t_far && t_near > 0.0 {
                t_near
            } else {
                f64::INFINITY
            };
            if dir.y > 1e-9 {
                let t_ground = ground_y / dir.y;
                if t_ground > 0.0 && t_ground < depth_hit {
                    depth_hit = t_ground;
                }
            }
            if depth_hit.is_finite() && depth_hit < 90.0 {
                values[v * width + u] = depth_hit as f32;
            }
        }
    }
    let depth = ScalarRaster::new(width, height, RasterKind::DepthMeters, values).unwrap();

    // Project the eight corners for the GT 2D box.
    let mut bbox = BBox2D {
        left: f64::INFINITY,
        top: f64::INFINITY,
        right: f64::NEG_INFINITY,
        bottom: f64::NEG_INFINITY,
    };
    for sx in [-1.0, 1.0] {
        for sy in [-1.0, 1.0] {
            for sz in [-1.0, 1.0] {
                let obj = Vector3::new(sx * half.x, sy * half.y, sz * half.z);
                let cam = Vector3::new(cos * obj.x + sin * obj.z, obj.y, -sin * obj.x + cos * obj.z)
                    + center.coords;
                let (pu, pv) =
                    crate::geometry::project_to_image(&Point3::from(cam), &calib).expect("ahead");
                bbox.left = bbox.left.min(pu);
                bbox.right = bbox.right.max(pu);
                bbox.top = bbox.top.min(pv);
                bbox.bottom = bbox.bottom.max(pv);
            }
        }
    }
    bbox.left = (bbox.left - 2.0).max(0.0);
    bbox.top = (bbox.top - 2.0).max(0.0);
    bbox.right = (bbox.right + 2.0).min(width as f64 - 1.0);
    bbox.bottom = (bbox.bottom + 2.0).min(height as f64 - 1.0);

    let gt_label = LabelRecord {
        class_name: ClassName::Car,
        truncation: 0.0,
        occlusion: 0,
        alpha: crate::geometry::normalize_angle(ry - center.x.atan2(center.z)),
        bbox2d: bbox,
        dims: (dims.2, dims.1, dims.0),
        location: (center.x, ground_y, center.z),
        rotation_y: ry,
        score: None,
    };
    let priors = SizePriors::from_labels(&[gt_label.clone()]);

    DepthScene {
        depth,
        calib,
        gt_label,
        priors,
    }
}

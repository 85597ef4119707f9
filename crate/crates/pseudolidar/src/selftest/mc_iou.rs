//! Monte-Carlo point-inclusion IoU oracle.
//!
//! Points are sampled uniformly inside the smaller box and tested for
//! inclusion in the other; the intersection estimate `p * area_small` then
//! gives `IoU = I / (A + B - I)`. Sampling inside a box is exact (a unit
//! square/cube pushed through the box pose), so the only error is binomial.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Box3D, Frame};

struct BevPose {
    center: [f64; 2],
    cos: f64,
    sin: f64,
    half_l: f64,
    half_w: f64,
}

impl BevPose {
    fn of(b: &Box3D) -> Self {
        let (sin, cos) = b.bev_angle().sin_cos();
        Self {
            center: b.bev_center(),
            cos,
            sin,
            half_l: b.length() / 2.0,
            half_w: b.width() / 2.0,
        }
    }

    /// Object-frame `(u, v)` in `[-1, 1]^2` to plane coordinates.
    fn emit(&self, u: f64, v: f64) -> [f64; 2] {
        let x = u * self.half_l;
        let y = v * self.half_w;
        [
            self.center[0] + x * self.cos - y * self.sin,
            self.center[1] + x * self.sin + y * self.cos,
        ]
    }

    fn contains(&self, p: [f64; 2]) -> bool {
        let dx = p[0] - self.center[0];
        let dy = p[1] - self.center[1];
        let u = dx * self.cos + dy * self.sin;
        let v = -dx * self.sin + dy * self.cos;
        u.abs() <= self.half_l && v.abs() <= self.half_w
    }
}

/// BEV IoU estimated from roughly `samples` point-inclusion tests. Points
/// are jitter-stratified on a grid inside the smaller box, which keeps the
/// estimator unbiased while shrinking the binomial noise.
pub fn monte_carlo_iou_bev(a: &Box3D, b: &Box3D, samples: usize, seed: u64) -> f64 {
    assert_eq!(a.frame(), b.frame(), "oracle needs a shared frame");
    let (small, large) = if a.bev_area() <= b.bev_area() { (a, b) } else { (b, a) };
    let sp = BevPose::of(small);
    let lp = BevPose::of(large);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = (samples as f64).sqrt().floor() as usize;
    let mut hits = 0usize;
    for i in 0..side {
        for j in 0..side {
            let u = -1.0 + 2.0 * (i as f64 + rng.random_range(0.0..1.0)) / side as f64;
            let v = -1.0 + 2.0 * (j as f64 + rng.random_range(0.0..1.0)) / side as f64;
            if lp.contains(sp.emit(u, v)) {
                hits += 1;
            }
        }
    }
    let inter = hits as f64 / (side * side) as f64 * small.bev_area();
    let union = a.bev_area() + b.bev_area() - inter;
    (inter / union).clamp(0.0, 1.0)
}

/// 3D IoU estimated from roughly `samples` point-inclusion tests (BEV
/// inclusion plus the vertical interval), jitter-stratified on a 3D grid.
pub fn monte_carlo_iou_3d(a: &Box3D, b: &Box3D, samples: usize, seed: u64) -> f64 {
    assert_eq!(a.frame(), b.frame(), "oracle needs a shared frame");
    let (small, large) = if a.volume() <= b.volume() { (a, b) } else { (b, a) };
    let sp = BevPose::of(small);
    let lp = BevPose::of(large);
    let (s_bot, s_top) = small.vertical_interval();
    let (l_bot, l_top) = large.vertical_interval();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = (samples as f64).cbrt().floor() as usize;
    let mut hits = 0usize;
    for i in 0..side {
        for j in 0..side {
            for k in 0..side {
                let u = -1.0 + 2.0 * (i as f64 + rng.random_range(0.0..1.0)) / side as f64;
                let v = -1.0 + 2.0 * (j as f64 + rng.random_range(0.0..1.0)) / side as f64;
                let h = (k as f64 + rng.random_range(0.0..1.0)) / side as f64;
                let z = s_bot + h * (s_top - s_bot);
                if z >= l_bot && z <= l_top && lp.contains(sp.emit(u, v)) {
                    hits += 1;
                }
            }
        }
    }
    let inter = hits as f64 / side.pow(3) as f64 * small.volume();
    let union = a.volume() + b.volume() - inter;
    (inter / union).clamp(0.0, 1.0)
}

/// A seeded box pair with overlap spread across the whole IoU range,
/// alternating between Velodyne and camera frames.
pub fn random_box_pair(rng: &mut ChaCha8Rng) -> (Box3D, Box3D) {
    let frame = if rng.random_bool(0.5) { Frame::Velodyne } else { Frame::Camera };
    let dims = |rng: &mut ChaCha8Rng| {
        (
            rng.random_range(2.0..5.0),
            rng.random_range(1.0..3.0),
            rng.random_range(1.0..2.5),
        )
    };
    let center = (
        rng.random_range(-20.0..20.0),
        rng.random_range(-20.0..20.0),
        rng.random_range(-2.0..2.0),
    );
    let yaw = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    let a = Box3D::new(frame, center, dims(rng), yaw).unwrap();
    // Offsets scale with the box so pairs range from identical-ish to
    // disjoint.
    let spread = rng.random_range(0.0..1.5);
    let center_b = (
        center.0 + rng.random_range(-spread..=spread) * a.length(),
        center.1 + rng.random_range(-spread..=spread) * a.width(),
        center.2 + rng.random_range(-spread..=spread) * a.height(),
    );
    let yaw_b = yaw + rng.random_range(-0.8..0.8);
    let b = Box3D::new(frame, center_b, dims(rng), yaw_b).unwrap();
    (a, b)
}

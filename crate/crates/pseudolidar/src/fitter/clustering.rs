//! Euclidean density clustering (DBSCAN) over (x, y, z), grid-accelerated.

use std::collections::HashMap;

use crate::geometry::PointCloud;

use super::{median_forward, ClusterSelection, FitterConfig};

/// DBSCAN with neighborhood radius `epsilon` and core threshold `min_points`
/// (the point itself counts). Returns clusters as index lists; noise points
/// are dropped.
pub fn dbscan(cloud: &PointCloud, epsilon: f64, min_points: usize) -> Vec<Vec<usize>> {
    let n = cloud.len();
    if n == 0 {
        return Vec::new();
    }
    let pos: Vec<[f64; 3]> = cloud
        .points()
        .iter()
        .map(|p| [p.x as f64, p.y as f64, p.z as f64])
        .collect();

    // Uniform grid with cell size epsilon: neighbors live in the 27
    // surrounding cells.
    let cell = |p: &[f64; 3]| -> (i64, i64, i64) {
        (
            (p[0] / epsilon).floor() as i64,
            (p[1] / epsilon).floor() as i64,
            (p[2] / epsilon).floor() as i64,
        )
    };
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    for (i, p) in pos.iter().enumerate() {
        grid.entry(cell(p)).or_default().push(i);
    }
    let eps2 = epsilon * epsilon;
    let neighbors = |i: usize| -> Vec<usize> {
        let (cx, cy, cz) = cell(&pos[i]);
        let mut out = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(bucket) = grid.get(&(cx + dx, cy + dy, cz + dz)) {
                        for &j in bucket {
                            let d = [
                                pos[i][0] - pos[j][0],
                                pos[i][1] - pos[j][1],
                                pos[i][2] - pos[j][2],
                            ];
                            if d[0] * d[0] + d[1] * d[1] + d[2] * d[2] <= eps2 {
                                out.push(j);
                            }
                        }
                    }
                }
            }
        }
        out
    };

    const UNVISITED: usize = usize::MAX;
    const NOISE: usize = usize::MAX - 1;
    let mut label = vec![UNVISITED; n];
    let mut clusters: Vec<Vec<usize>> = Vec::new();

    for i in 0..n {
        if label[i] != UNVISITED {
            continue;
        }
        let seed = neighbors(i);
        if seed.len() < min_points {
            label[i] = NOISE;
            continue;
        }
        let id = clusters.len();
        label[i] = id;
        let mut members = vec![i];
        let mut queue = seed;
        let mut head = 0;
        while head < queue.len() {
            let j = queue[head];
            head += 1;
            if label[j] == NOISE {
                label[j] = id; // border point adopted by the cluster
                members.push(j);
            }
            if label[j] != UNVISITED {
                continue;
            }
            label[j] = id;
            members.push(j);
            let reach = neighbors(j);
            if reach.len() >= min_points {
                queue.extend(reach);
            }
        }
        members.sort_unstable();
        members.dedup();
        clusters.push(members);
    }
    clusters
}

/// Clusters the frustum points and picks one cluster per the configured
/// rule; `None` when the frustum is too small or nothing clusters.
pub fn cluster_and_select(points: &PointCloud, cfg: &FitterConfig) -> Option<PointCloud> {
    if points.len() < cfg.min_frustum_points {
        return None;
    }
    let clusters = dbscan(points, cfg.cluster_epsilon, cfg.cluster_min_points);
    if clusters.is_empty() {
        return None;
    }
    let chosen = match cfg.cluster_selection {
        ClusterSelection::LargestCluster => clusters
            .iter()
            .enumerate()
            .max_by_key(|(_, c)| c.len())
            .map(|(i, _)| i)
            .unwrap(),
        ClusterSelection::NearestMedianDepth => {
            let frustum_median = median_forward(points);
            clusters
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| {
                    let da = (median_forward(&points.select(a)) - frustum_median).abs();
                    let db = (median_forward(&points.select(b)) - frustum_median).abs();
                    da.partial_cmp(&db).unwrap()
                })
                .map(|(i, _)| i)
                .unwrap()
        }
    };
    Some(points.select(&clusters[chosen]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CloudPoint, Frame};

    fn blob(center: [f32; 3], count: usize, spread: f32) -> Vec<CloudPoint> {
        // Deterministic lattice-ish blob, dense enough to be core points.
        (0..count)
            .map(|i| {
                let a = (i % 7) as f32 / 7.0 - 0.5;
                let b = ((i / 7) % 7) as f32 / 7.0 - 0.5;
                let c = (i / 49) as f32 / 7.0 - 0.5;
                CloudPoint::new(
                    center[0] + a * spread,
                    center[1] + b * spread,
                    center[2] + c * spread,
                    0.0,
                )
            })
            .collect()
    }

    fn velo(points: Vec<CloudPoint>) -> PointCloud {
        PointCloud::from_points(Frame::Velodyne, points)
    }

    #[test]
    fn largest_cluster_selection() {
        let mut points = blob([8.0, 0.0, 0.0], 120, 1.0);
        points.extend(blob([30.0, 5.0, 0.0], 100, 1.0));
        let cfg = FitterConfig {
            cluster_selection: ClusterSelection::LargestCluster,
            ..FitterConfig::default()
        };
        let cluster = cluster_and_select(&velo(points), &cfg).unwrap();
        assert_eq!(cluster.len(), 120);
        assert!(cluster.points().iter().all(|p| p.x < 20.0));
    }

    #[test]
    fn sparse_points_yield_none() {
        let points = vec![
            CloudPoint::new(0.0, 0.0, 0.0, 0.0),
            CloudPoint::new(5.0, 5.0, 0.0, 0.0),
            CloudPoint::new(-5.0, 3.0, 1.0, 0.0),
        ];
        let cfg = FitterConfig {
            min_frustum_points: 1,
            ..FitterConfig::default()
        };
        assert!(cluster_and_select(&velo(points), &cfg).is_none());
    }

    #[test]
    fn small_frustum_yields_none() {
        let points = blob([8.0, 0.0, 0.0], 5, 0.5);
        let cfg = FitterConfig::default(); // min_frustum_points = 10
        assert!(cluster_and_select(&velo(points), &cfg).is_none());
    }

    #[test]
    fn nearest_median_depth_prefers_the_near_blob() {
        // 80-point blob at 8 m vs a larger 100-point blob at 30 m. Sparse
        // non-clusterable returns at 5-10 m pull the frustum median to ~9 m,
        // so the smaller near blob wins over the larger far one.
        let mut points = blob([8.0, 0.0, 0.0], 80, 1.0);
        points.extend(blob([30.0, 0.0, 0.0], 100, 1.0));
        for i in 0..60 {
            points.push(CloudPoint::new(5.0 + 0.08 * i as f32, 4.0 + 0.6 * i as f32, 0.0, 0.0));
        }
        let cfg = FitterConfig {
            cluster_selection: ClusterSelection::NearestMedianDepth,
            ..FitterConfig::default()
        };
        let frustum = velo(points);
        let median = median_forward(&frustum);
        assert!(median > 7.0 && median < 10.0, "median {median}");
        let cluster = cluster_and_select(&frustum, &cfg).unwrap();
        assert_eq!(cluster.len(), 80);
        assert!(cluster.points().iter().all(|p| p.x < 20.0));

        // The largest-cluster rule would have taken the far blob instead.
        let largest = cluster_and_select(
            &frustum,
            &FitterConfig {
                cluster_selection: ClusterSelection::LargestCluster,
                ..FitterConfig::default()
            },
        )
        .unwrap();
        assert_eq!(largest.len(), 100);
    }

    #[test]
    fn well_separated_blobs_form_two_clusters() {
        let mut points = blob([8.0, 0.0, 0.0], 100, 1.0);
        points.extend(blob([30.0, 5.0, 0.0], 100, 1.0));
        let clusters = dbscan(&velo(points), 0.5, 10);
        assert_eq!(clusters.len(), 2);
        assert_eq!(clusters.iter().map(Vec::len).sum::<usize>(), 200);
    }

    #[test]
    fn empty_cloud_has_no_clusters() {
        assert!(dbscan(&velo(vec![]), 0.5, 10).is_empty());
    }
}

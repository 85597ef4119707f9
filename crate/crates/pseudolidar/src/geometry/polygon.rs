//! Convex polygon intersection by half-plane clipping.

use super::GeometryError;

/// Signed shoelace area; positive for counter-clockwise vertex order.
pub(crate) fn signed_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut sum = 0.0;
    for i in 0..n {
        let [x0, y0] = poly[i];
        let [x1, y1] = poly[(i + 1) % n];
        sum += x0 * y1 - x1 * y0;
    }
    sum / 2.0
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segment_line_intersection(p: [f64; 2], q: [f64; 2], a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    // Intersection of segment pq with the infinite line ab; callers only
    // invoke this when p and q straddle the line, so the denominator is
    // nonzero.
    let dpq = [q[0] - p[0], q[1] - p[1]];
    let dab = [b[0] - a[0], b[1] - a[1]];
    let denom = dpq[0] * dab[1] - dpq[1] * dab[0];
    let t = ((a[0] - p[0]) * dab[1] - (a[1] - p[1]) * dab[0]) / denom;
    [p[0] + t * dpq[0], p[1] + t * dpq[1]]
}

/// Area of the intersection of two convex CCW polygons via
/// Sutherland-Hodgman clipping with inclusive half-planes. Degenerate
/// (shared-edge) intersections return exactly 0.0.
pub fn convex_polygon_intersection_area(
    a: &[[f64; 2]],
    b: &[[f64; 2]],
) -> Result<f64, GeometryError> {
    for poly in [a, b] {
        if poly.len() < 3 || signed_area(poly) <= 0.0 {
            return Err(GeometryError::DegeneratePolygon);
        }
    }

    let mut output: Vec<[f64; 2]> = a.to_vec();
    for i in 0..b.len() {
        if output.len() < 3 {
            break;
        }
        let edge_a = b[i];
        let edge_b = b[(i + 1) % b.len()];
        let input = std::mem::take(&mut output);
        for j in 0..input.len() {
            let current = input[j];
            let next = input[(j + 1) % input.len()];
            let cur_inside = cross(edge_a, edge_b, current) >= 0.0;
            let next_inside = cross(edge_a, edge_b, next) >= 0.0;
            if cur_inside {
                output.push(current);
                if !next_inside {
                    output.push(segment_line_intersection(current, next, edge_a, edge_b));
                }
            } else if next_inside {
                output.push(segment_line_intersection(current, next, edge_a, edge_b));
            }
        }
    }

    if output.len() < 3 {
        return Ok(0.0);
    }
    let area = signed_area(&output);
    // Snap float dust from boundary-touching cases to an exact zero.
    if area <= 1e-12 {
        Ok(0.0)
    } else {
        Ok(area)
    }
}

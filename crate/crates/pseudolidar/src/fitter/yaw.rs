//! Yaw from the principal axis of the ground-plane point spread.

/// Result of a principal-axis yaw estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YawEstimate {
    /// Orientation of the first principal axis, radians in `(-pi/2, pi/2]`
    /// (boxes are symmetric under a half turn).
    pub yaw: f64,
    /// Ratio of the larger to the smaller covariance eigenvalue;
    /// `f64::INFINITY` for perfectly collinear spreads.
    pub anisotropy: f64,
    /// Set when the spread carries no direction (fewer than two distinct
    /// points); the yaw is then 0 by convention.
    pub degenerate: bool,
}

/// Folds an angle into `(-pi/2, pi/2]`.
pub(super) fn fold_to_half_circle(a: f64) -> f64 {
    let mut r = a % std::f64::consts::PI;
    if r <= -std::f64::consts::FRAC_PI_2 {
        r += std::f64::consts::PI;
    } else if r > std::f64::consts::FRAC_PI_2 {
        r -= std::f64::consts::PI;
    }
    r
}

/// Orientation of the first principal axis of the 2D covariance of
/// ground-plane coordinates, modulo the box half-turn symmetry.
pub fn pca_yaw(points: &[[f64; 2]]) -> YawEstimate {
    let n = points.len();
    if n < 2 {
        return YawEstimate {
            yaw: 0.0,
            anisotropy: 1.0,
            degenerate: true,
        };
    }
    let mean = points.iter().fold([0.0, 0.0], |m, p| [m[0] + p[0], m[1] + p[1]]);
    let mean = [mean[0] / n as f64, mean[1] / n as f64];
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let dx = p[0] - mean[0];
        let dy = p[1] - mean[1];
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    sxx /= n as f64;
    sxy /= n as f64;
    syy /= n as f64;

    let trace = sxx + syy;
    if trace <= 0.0 {
        // All points coincident.
        return YawEstimate {
            yaw: 0.0,
            anisotropy: 1.0,
            degenerate: true,
        };
    }
    let delta = ((sxx - syy).powi(2) + 4.0 * sxy * sxy).sqrt();
    let lambda_max = (trace + delta) / 2.0;
    let lambda_min = (trace - delta) / 2.0;
    let anisotropy = if lambda_min <= 0.0 {
        f64::INFINITY
    } else {
        lambda_max / lambda_min
    };
    // Eigenvector angle of the dominant axis of a symmetric 2x2 matrix.
    let yaw = fold_to_half_circle(0.5 * (2.0 * sxy).atan2(sxx - syy));
    YawEstimate {
        yaw,
        anisotropy,
        degenerate: false,
    }
}

//! KITTI calibration files: `calib/XXXXXX.txt`.

use nalgebra::{Matrix3, Matrix3x4};

use super::FormatError;

/// Per-frame KITTI calibration: left color camera projection, rectification
/// rotation, and the Velodyne-to-camera extrinsics.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    /// 3x4 projection matrix of the left color camera (P2).
    pub p2: Matrix3x4<f64>,
    /// 3x3 rectification rotation (R0_rect).
    pub r0_rect: Matrix3<f64>,
    /// 3x4 rigid transform, Velodyne -> unrectified camera (Tr_velo_to_cam).
    pub tr_velo_to_cam: Matrix3x4<f64>,
    /// Focal lengths in pixels, extracted from P2.
    pub fx: f64,
    pub fy: f64,
    /// Principal point in pixels, extracted from P2.
    pub cx: f64,
    pub cy: f64,
}

const ROTATION_TOL: f64 = 1e-4;

fn check_rotation(r: &Matrix3<f64>, what: &str) -> Result<(), FormatError> {
    let det = r.determinant();
    if (det - 1.0).abs() >= ROTATION_TOL {
        return Err(FormatError::InvalidCalibration(format!(
            "{what}: determinant {det} is not 1"
        )));
    }
    let gram = r * r.transpose();
    let err = (gram - Matrix3::identity()).abs().max();
    if err >= ROTATION_TOL {
        return Err(FormatError::InvalidCalibration(format!(
            "{what}: R*R^T deviates from identity by {err}"
        )));
    }
    Ok(())
}

impl Calibration {
    /// Builds a calibration from raw matrices, extracting the intrinsics from
    /// P2 and checking the rotation invariants.
    pub fn new(
        p2: Matrix3x4<f64>,
        r0_rect: Matrix3<f64>,
        tr_velo_to_cam: Matrix3x4<f64>,
    ) -> Result<Self, FormatError> {
        let fx = p2[(0, 0)];
        let fy = p2[(1, 1)];
        if fx <= 0.0 || fy <= 0.0 {
            return Err(FormatError::InvalidCalibration(format!(
                "focal lengths must be positive, got fx={fx}, fy={fy}"
            )));
        }
        check_rotation(&r0_rect, "R0_rect")?;
        check_rotation(&tr_velo_to_cam.fixed_view::<3, 3>(0, 0).into_owned(), "Tr_velo_to_cam")?;
        Ok(Self {
            p2,
            r0_rect,
            tr_velo_to_cam,
            fx,
            fy,
            cx: p2[(0, 2)],
            cy: p2[(1, 2)],
        })
    }

    /// Rotation part of Tr_velo_to_cam.
    pub fn velo_rotation(&self) -> Matrix3<f64> {
        self.tr_velo_to_cam.fixed_view::<3, 3>(0, 0).into_owned()
    }

    /// Translation part of Tr_velo_to_cam.
    pub fn velo_translation(&self) -> nalgebra::Vector3<f64> {
        self.tr_velo_to_cam.column(3).into_owned()
    }
}

/// Parses a KITTI calibration file.
///
/// The file is a sequence of `KEY: v1 v2 ...` lines; `P2` (12 values),
/// `R0_rect` (9 values) and `Tr_velo_to_cam` (12 values) are required, other
/// keys are ignored.
pub fn parse_calibration(text: &str) -> Result<Calibration, FormatError> {
    let mut p2: Option<Vec<f64>> = None;
    let mut r0: Option<Vec<f64>> = None;
    let mut tr: Option<Vec<f64>> = None;

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, rest)) = line.split_once(':') else {
            continue; // not a key/value line
        };
        let key = key.trim();
        let slot = match key {
            "P2" => &mut p2,
            "R0_rect" => &mut r0,
            "Tr_velo_to_cam" => &mut tr,
            _ => continue,
        };
        let expected = if key == "R0_rect" { 9 } else { 12 };
        let mut values = Vec::with_capacity(expected);
        for token in rest.split_whitespace() {
            let v: f64 = token.parse().map_err(|_| FormatError::MalformedNumber {
                line: line_no,
                token: token.to_string(),
            })?;
            values.push(v);
        }
        if values.len() != expected {
            return Err(FormatError::WrongArity {
                key: key.to_string(),
                expected,
                got: values.len(),
            });
        }
        *slot = Some(values);
    }

    let p2 = p2.ok_or(FormatError::MissingKey("P2"))?;
    let r0 = r0.ok_or(FormatError::MissingKey("R0_rect"))?;
    let tr = tr.ok_or(FormatError::MissingKey("Tr_velo_to_cam"))?;

    Calibration::new(
        Matrix3x4::from_row_slice(&p2),
        Matrix3::from_row_slice(&r0),
        Matrix3x4::from_row_slice(&tr),
    )
}

/// Serializes a calibration back to the KITTI text layout.
///
/// Values are written in scientific notation with 12 fractional digits, the
/// precision KITTI distributes, so parse/serialize round-trips are lossless
/// well below the 1e-6 comparison tolerance.
pub fn serialize_calibration(calib: &Calibration) -> String {
    fn row_major_3x4(m: &Matrix3x4<f64>) -> Vec<f64> {
        (0..3).flat_map(|r| (0..4).map(move |c| (r, c))).map(|(r, c)| m[(r, c)]).collect()
    }
    fn fmt(values: &[f64]) -> String {
        values.iter().map(|v| format!("{v:.12e}")).collect::<Vec<_>>().join(" ")
    }
    let r0: Vec<f64> = (0..3)
        .flat_map(|r| (0..3).map(move |c| (r, c)))
        .map(|(r, c)| calib.r0_rect[(r, c)])
        .collect();
    format!(
        "P2: {}\nR0_rect: {}\nTr_velo_to_cam: {}\n",
        fmt(&row_major_3x4(&calib.p2)),
        fmt(&r0),
        fmt(&row_major_3x4(&calib.tr_velo_to_cam)),
    )
}

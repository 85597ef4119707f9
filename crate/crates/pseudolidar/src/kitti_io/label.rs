//! KITTI object labels (`label_2/XXXXXX.txt`) and detection files (same
//! layout plus a trailing score).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::FormatError;

/// Object classes of the KITTI object benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassName {
    Car,
    Pedestrian,
    Cyclist,
    Van,
    Truck,
    PersonSitting,
    Tram,
    Misc,
    DontCare,
}

impl ClassName {
    pub const ALL: [ClassName; 9] = [
        ClassName::Car,
        ClassName::Pedestrian,
        ClassName::Cyclist,
        ClassName::Van,
        ClassName::Truck,
        ClassName::PersonSitting,
        ClassName::Tram,
        ClassName::Misc,
        ClassName::DontCare,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ClassName::Car => "Car",
            ClassName::Pedestrian => "Pedestrian",
            ClassName::Cyclist => "Cyclist",
            ClassName::Van => "Van",
            ClassName::Truck => "Truck",
            ClassName::PersonSitting => "Person_sitting",
            ClassName::Tram => "Tram",
            ClassName::Misc => "Misc",
            ClassName::DontCare => "DontCare",
        }
    }
}

impl fmt::Display for ClassName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassName {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ClassName::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or(())
    }
}

/// 2D image-plane box in pixels, `(left, top)` to `(right, bottom)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox2D {
    pub left: f64,
    pub top: f64,
    pub right: f64,
    pub bottom: f64,
}

impl BBox2D {
    pub fn width(&self) -> f64 {
        self.right - self.left
    }

    pub fn height(&self) -> f64 {
        self.bottom - self.top
    }

    pub fn area(&self) -> f64 {
        (self.width().max(0.0)) * (self.height().max(0.0))
    }

    /// Axis-aligned intersection area with another box.
    pub fn intersection_area(&self, other: &BBox2D) -> f64 {
        let w = self.right.min(other.right) - self.left.max(other.left);
        let h = self.bottom.min(other.bottom) - self.top.max(other.top);
        if w > 0.0 && h > 0.0 {
            w * h
        } else {
            0.0
        }
    }
}

/// One line of a KITTI label or detection file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub class_name: ClassName,
    /// Fraction of the object outside the image, in `[0, 1]` (-1 for DontCare).
    pub truncation: f64,
    /// 0 = fully visible, 1 = partly occluded, 2 = largely occluded, 3 = unknown.
    pub occlusion: i32,
    /// Observation angle in radians.
    pub alpha: f64,
    pub bbox2d: BBox2D,
    /// Box extents in meters: (height, width, length).
    pub dims: (f64, f64, f64),
    /// Bottom-face center in rectified camera coordinates, meters.
    pub location: (f64, f64, f64),
    /// Yaw around the camera Y axis, radians in `[-pi, pi]`.
    pub rotation_y: f64,
    /// Detection confidence; present only in detection files.
    pub score: Option<f64>,
}

impl LabelRecord {
    pub fn height_px(&self) -> f64 {
        self.bbox2d.height()
    }

    fn validate(&self, line: usize) -> Result<(), FormatError> {
        // DontCare rows use -1/-10 placeholders everywhere and may carry a
        // degenerate 2D box, so they are exempt from the range checks.
        if self.class_name == ClassName::DontCare {
            return Ok(());
        }
        let fail = |reason: String| FormatError::InvalidLabel { line, reason };
        if !(0.0..=1.0).contains(&self.truncation) {
            return Err(fail(format!("truncation {} outside [0,1]", self.truncation)));
        }
        if !(0..=3).contains(&self.occlusion) {
            return Err(fail(format!("occlusion {} outside 0..=3", self.occlusion)));
        }
        if self.bbox2d.right <= self.bbox2d.left || self.bbox2d.bottom <= self.bbox2d.top {
            return Err(fail("degenerate 2D box".into()));
        }
        let (h, w, l) = self.dims;
        if h < 0.0 || w < 0.0 || l < 0.0 {
            return Err(fail(format!("negative dimensions ({h}, {w}, {l})")));
        }
        if !(-std::f64::consts::PI..=std::f64::consts::PI).contains(&self.rotation_y) {
            return Err(fail(format!("rotation_y {} outside [-pi, pi]", self.rotation_y)));
        }
        if let Some(s) = self.score {
            if !(0.0..=1.0).contains(&s) {
                return Err(fail(format!("score {s} outside [0,1]")));
            }
        }
        Ok(())
    }
}

/// Parses a KITTI label/detection file.
///
/// Each non-empty line must have 15 whitespace-separated fields, or exactly
/// 16 when `require_score` is set. Line order is preserved; DontCare rows are
/// retained.
pub fn parse_labels(text: &str, require_score: bool) -> Result<Vec<LabelRecord>, FormatError> {
    let expected = if require_score { 16 } else { 15 };
    let mut records = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let fields: Vec<&str> = raw_line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != expected {
            return Err(FormatError::WrongFieldCount {
                line,
                expected,
                got: fields.len(),
            });
        }
        let class_name =
            ClassName::from_str(fields[0]).map_err(|_| FormatError::UnknownClassName {
                line,
                name: fields[0].to_string(),
            })?;
        let num = |token: &str| -> Result<f64, FormatError> {
            token.parse().map_err(|_| FormatError::MalformedNumber {
                line,
                token: token.to_string(),
            })
        };
        let record = LabelRecord {
            class_name,
            truncation: num(fields[1])?,
            occlusion: num(fields[2])? as i32,
            alpha: num(fields[3])?,
            bbox2d: BBox2D {
                left: num(fields[4])?,
                top: num(fields[5])?,
                right: num(fields[6])?,
                bottom: num(fields[7])?,
            },
            dims: (num(fields[8])?, num(fields[9])?, num(fields[10])?),
            location: (num(fields[11])?, num(fields[12])?, num(fields[13])?),
            rotation_y: num(fields[14])?,
            score: if require_score {
                Some(num(fields[15])?)
            } else {
                None
            },
        };
        record.validate(line)?;
        records.push(record);
    }
    Ok(records)
}

/// Serializes records to the KITTI text layout, 6 decimal places per value.
/// Records carrying a score produce 16-field detection lines.
pub fn serialize_labels(records: &[LabelRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let (h, w, l) = r.dims;
        let (x, y, z) = r.location;
        out.push_str(&format!(
            "{} {:.6} {} {:.6} {:.6} {:.6} {:.6} {:.6} {:.6} {:.6} {:.6} {:.6} {:.6} {:.6} {:.6}",
            r.class_name,
            r.truncation,
            r.occlusion,
            r.alpha,
            r.bbox2d.left,
            r.bbox2d.top,
            r.bbox2d.right,
            r.bbox2d.bottom,
            h,
            w,
            l,
            x,
            y,
            z,
            r.rotation_y,
        ));
        if let Some(s) = r.score {
            out.push_str(&format!(" {s:.6}"));
        }
        out.push('\n');
    }
    out
}

//! Parsers and serializers for the file formats the pipeline touches:
//! KITTI calibration text, KITTI object labels/detections, 16-bit depth and
//! confidence PNGs, 8-bit RGB images, and point-cloud `.bin` files.
//!
//! Everything here is a pure function of its input bytes; parsed types are
//! immutable and thread-safe.

mod calib;
mod cloud_bin;
mod label;
mod raster;

pub use calib::{parse_calibration, serialize_calibration, Calibration};
pub use cloud_bin::{read_pointcloud_bin, write_pointcloud_bin};
pub use label::{parse_labels, serialize_labels, BBox2D, ClassName, LabelRecord};
pub use raster::{
    read_confidence_png, read_depth_png, read_image_png, rgb_to_grayscale, write_confidence_png,
    write_depth_png, RasterKind, ScalarRaster,
};

use thiserror::Error;

/// Errors produced while parsing or serializing KITTI-format files.
#[derive(Debug, Error)]
pub enum FormatError {
    #[error("missing key `{0}`")]
    MissingKey(&'static str),
    #[error("line {line}: malformed number `{token}`")]
    MalformedNumber { line: usize, token: String },
    #[error("key `{key}`: expected {expected} values, got {got}")]
    WrongArity {
        key: String,
        expected: usize,
        got: usize,
    },
    #[error("line {line}: expected {expected} fields, got {got}")]
    WrongFieldCount {
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("line {line}: unknown class name `{name}`")]
    UnknownClassName { line: usize, name: String },
    #[error("line {line}: invalid label: {reason}")]
    InvalidLabel { line: usize, reason: String },
    #[error("invalid calibration: {0}")]
    InvalidCalibration(String),
    #[error("not a PNG stream")]
    NotPng,
    #[error("expected a 16-bit PNG, got bit depth {got}")]
    WrongBitDepth { got: u8 },
    #[error("expected a {expected}-channel image, got {got}")]
    WrongChannelCount { expected: u8, got: u8 },
    #[error("point cloud byte length {len} is not a multiple of 16")]
    TruncatedFile { len: usize },
    #[error("invalid raster: {0}")]
    InvalidRaster(String),
    #[error("raster kind mismatch: expected {expected:?}, got {got:?}")]
    WrongRasterKind {
        expected: RasterKind,
        got: RasterKind,
    },
}

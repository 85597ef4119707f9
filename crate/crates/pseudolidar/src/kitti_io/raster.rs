//! Dense per-pixel rasters and their PNG encodings.
//!
//! Depth maps follow the KITTI depth-benchmark convention: 16-bit grayscale
//! PNG, `meters = raw / 256`, raw 0 = invalid. Confidence maps are 16-bit
//! grayscale PNG scaled by 65535. Grayscale intensity comes from 8-bit RGB
//! via BT.601 luma.

use std::io::Cursor;

use image::{DynamicImage, ImageBuffer, ImageFormat, Luma};

use super::FormatError;

/// What the scalar values of a raster mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum RasterKind {
    /// Metric depth in meters; 0 encodes an invalid pixel.
    DepthMeters,
    /// Grayscale intensity in [0, 1].
    Grayscale01,
    /// Instance-mask confidence in [0, 1].
    Confidence01,
}

/// A dense row-major single-channel raster.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarRaster {
    width: usize,
    height: usize,
    kind: RasterKind,
    values: Vec<f32>,
}

impl ScalarRaster {
    /// Builds a raster, checking the length and the per-kind value range.
    pub fn new(
        width: usize,
        height: usize,
        kind: RasterKind,
        values: Vec<f32>,
    ) -> Result<Self, FormatError> {
        if values.len() != width * height {
            return Err(FormatError::InvalidRaster(format!(
                "{} values for {width}x{height}",
                values.len()
            )));
        }
        for &v in &values {
            if !v.is_finite() {
                return Err(FormatError::InvalidRaster(format!("non-finite value {v}")));
            }
            let ok = match kind {
                RasterKind::DepthMeters => v >= 0.0,
                RasterKind::Grayscale01 | RasterKind::Confidence01 => (0.0..=1.0).contains(&v),
            };
            if !ok {
                return Err(FormatError::InvalidRaster(format!(
                    "value {v} out of range for {kind:?}"
                )));
            }
        }
        Ok(Self {
            width,
            height,
            kind,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn kind(&self) -> RasterKind {
        self.kind
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    /// Value at pixel `(u, v)`; `u` is the column, `v` the row.
    pub fn get(&self, u: usize, v: usize) -> f32 {
        debug_assert!(u < self.width && v < self.height);
        self.values[v * self.width + u]
    }
}

fn decode_png(bytes: &[u8]) -> Result<DynamicImage, FormatError> {
    const PNG_MAGIC: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0d, 0x0a, 0x1a, 0x0a];
    if bytes.len() < 8 || bytes[..8] != PNG_MAGIC {
        return Err(FormatError::NotPng);
    }
    image::load_from_memory_with_format(bytes, ImageFormat::Png).map_err(|_| FormatError::NotPng)
}

fn decode_luma16(bytes: &[u8]) -> Result<(usize, usize, Vec<u16>), FormatError> {
    let img = decode_png(bytes)?;
    let color = img.color();
    if color.bits_per_pixel() / color.channel_count() as u16 != 16 {
        return Err(FormatError::WrongBitDepth {
            got: (color.bits_per_pixel() / color.channel_count() as u16) as u8,
        });
    }
    if color.channel_count() != 1 {
        return Err(FormatError::WrongChannelCount {
            expected: 1,
            got: color.channel_count(),
        });
    }
    let luma = img.into_luma16();
    let (w, h) = (luma.width() as usize, luma.height() as usize);
    Ok((w, h, luma.into_raw()))
}

fn encode_luma16(width: usize, height: usize, raw: Vec<u16>) -> Vec<u8> {
    let img: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_raw(width as u32, height as u32, raw).expect("raster length checked");
    let mut out = Cursor::new(Vec::new());
    img.write_to(&mut out, ImageFormat::Png).expect("in-memory PNG encode");
    out.into_inner()
}

/// Reads a 16-bit grayscale PNG as metric depth (`meters = raw / 256`).
pub fn read_depth_png(bytes: &[u8]) -> Result<ScalarRaster, FormatError> {
    let (w, h, raw) = decode_luma16(bytes)?;
    let values = raw.iter().map(|&r| r as f32 / 256.0).collect();
    ScalarRaster::new(w, h, RasterKind::DepthMeters, values)
}

/// Writes a depth raster as 16-bit PNG (`raw = round(meters * 256)`,
/// saturating at the u16 range).
pub fn write_depth_png(raster: &ScalarRaster) -> Result<Vec<u8>, FormatError> {
    if raster.kind != RasterKind::DepthMeters {
        return Err(FormatError::WrongRasterKind {
            expected: RasterKind::DepthMeters,
            got: raster.kind,
        });
    }
    let raw: Vec<u16> = raster
        .values
        .iter()
        .map(|&m| ((m as f64) * 256.0).round().clamp(0.0, u16::MAX as f64) as u16)
        .collect();
    Ok(encode_luma16(raster.width, raster.height, raw))
}

/// Reads a 16-bit grayscale PNG as a confidence map (`value = raw / 65535`).
pub fn read_confidence_png(bytes: &[u8]) -> Result<ScalarRaster, FormatError> {
    let (w, h, raw) = decode_luma16(bytes)?;
    let values = raw.iter().map(|&r| r as f32 / 65535.0).collect();
    ScalarRaster::new(w, h, RasterKind::Confidence01, values)
}

/// Writes a confidence raster as 16-bit PNG (`raw = round(value * 65535)`).
pub fn write_confidence_png(raster: &ScalarRaster) -> Result<Vec<u8>, FormatError> {
    if raster.kind != RasterKind::Confidence01 {
        return Err(FormatError::WrongRasterKind {
            expected: RasterKind::Confidence01,
            got: raster.kind,
        });
    }
    let raw: Vec<u16> = raster
        .values
        .iter()
        .map(|&v| ((v as f64) * 65535.0).round().clamp(0.0, 65535.0) as u16)
        .collect();
    Ok(encode_luma16(raster.width, raster.height, raw))
}

/// Decodes a PNG image without constraining its pixel format.
pub fn read_image_png(bytes: &[u8]) -> Result<DynamicImage, FormatError> {
    decode_png(bytes)
}

/// Converts an 8-bit RGB image to grayscale intensity in [0, 1] using
/// BT.601 luma: `(0.299 R + 0.587 G + 0.114 B) / 255`.
pub fn rgb_to_grayscale(img: &DynamicImage) -> Result<ScalarRaster, FormatError> {
    let color = img.color();
    if color.channel_count() != 3 {
        return Err(FormatError::WrongChannelCount {
            expected: 3,
            got: color.channel_count(),
        });
    }
    if color.bits_per_pixel() / 3 != 8 {
        return Err(FormatError::WrongBitDepth {
            got: (color.bits_per_pixel() / 3) as u8,
        });
    }
    let rgb = img.to_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    let values = rgb
        .pixels()
        .map(|p| {
            let luma =
                (0.299 * p.0[0] as f64 + 0.587 * p.0[1] as f64 + 0.114 * p.0[2] as f64) / 255.0;
            luma.clamp(0.0, 1.0) as f32
        })
        .collect();
    ScalarRaster::new(w, h, RasterKind::Grayscale01, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn depth_raster(values: Vec<f32>) -> ScalarRaster {
        ScalarRaster::new(values.len(), 1, RasterKind::DepthMeters, values).unwrap()
    }

    #[test]
    fn depth_scaling_is_raw_over_256() {
        let bytes = write_depth_png(&depth_raster(vec![1.0, 0.0, 60.0])).unwrap();
        let raster = read_depth_png(&bytes).unwrap();
        assert_eq!(raster.get(0, 0), 1.0); // raw 256
        assert_eq!(raster.get(1, 0), 0.0); // raw 0 stays invalid
        assert_eq!(raster.get(2, 0), 60.0); // raw 15360
    }

    #[test]
    fn depth_round_trip_exact_for_multiples_of_1_over_256() {
        let values: Vec<f32> = (0..2048).map(|i| i as f32 / 256.0).collect();
        let raster = ScalarRaster::new(64, 32, RasterKind::DepthMeters, values).unwrap();
        let back = read_depth_png(&write_depth_png(&raster).unwrap()).unwrap();
        assert_eq!(raster, back);
    }

    #[test]
    fn confidence_scaling_is_raw_over_65535() {
        let raster =
            ScalarRaster::new(3, 1, RasterKind::Confidence01, vec![1.0, 0.0, 32768.0 / 65535.0])
                .unwrap();
        let back = read_confidence_png(&write_confidence_png(&raster).unwrap()).unwrap();
        assert_eq!(back.get(0, 0), 1.0);
        assert_eq!(back.get(1, 0), 0.0);
        let expected = 32768.0_f64 / 65535.0; // 0.500008...
        assert!((back.get(2, 0) as f64 - expected).abs() < 1e-6);
    }

    #[test]
    fn non_png_bytes_rejected() {
        assert!(matches!(read_depth_png(b"not a png"), Err(FormatError::NotPng)));
    }

    #[test]
    fn eight_bit_png_rejected() {
        let img: ImageBuffer<Luma<u8>, Vec<u8>> = ImageBuffer::from_raw(2, 2, vec![0; 4]).unwrap();
        let mut out = Cursor::new(Vec::new());
        img.write_to(&mut out, ImageFormat::Png).unwrap();
        assert!(matches!(
            read_depth_png(&out.into_inner()),
            Err(FormatError::WrongBitDepth { got: 8 })
        ));
    }

    #[test]
    fn grayscale_luma() {
        let mut rgb = image::RgbImage::new(3, 1);
        rgb.put_pixel(0, 0, image::Rgb([255, 255, 255]));
        rgb.put_pixel(1, 0, image::Rgb([0, 0, 0]));
        rgb.put_pixel(2, 0, image::Rgb([255, 0, 0]));
        let raster = rgb_to_grayscale(&DynamicImage::ImageRgb8(rgb)).unwrap();
        assert_eq!(raster.get(0, 0), 1.0);
        assert_eq!(raster.get(1, 0), 0.0);
        assert!((raster.get(2, 0) as f64 - 0.299).abs() < 1e-6);
    }

    #[test]
    fn grayscale_rejects_non_rgb() {
        let gray = DynamicImage::ImageLuma8(image::GrayImage::new(2, 2));
        assert!(matches!(
            rgb_to_grayscale(&gray),
            Err(FormatError::WrongChannelCount { expected: 3, got: 1 })
        ));
    }
}

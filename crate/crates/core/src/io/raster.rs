//! Masks, depth maps and RGB frames.
//!
//! Masks are 8-bit grayscale images where values above 127 are interior.
//! Depth maps are either 16-bit grayscale PNGs with a `<file>.meta` sidecar
//! holding `millimeters_per_unit = <value>` (depth in world units is
//! `value * millimeters_per_unit / 1000`), or a whitespace-separated float
//! grid, one image row per line.

use std::path::{Path, PathBuf};

use image::{GrayImage, ImageBuffer, Luma, RgbImage};

use super::read_file;
use crate::error::{Error, ParseError, Result};
use crate::grid::{DepthMap, Mask};

pub const MASK_THRESHOLD: u8 = 127;

pub fn mask_from_gray(img: &GrayImage) -> Mask {
    let values = img.pixels().map(|p| p.0[0] > MASK_THRESHOLD).collect();
    Mask::from_vec(img.width(), img.height(), values).expect("sized from image")
}

pub fn read_mask(path: &Path) -> Result<Mask> {
    let img = image::open(path).map_err(|e| Error::from(e).in_file(path))?;
    Ok(mask_from_gray(&img.to_luma8()))
}

pub fn mask_to_gray(mask: &Mask) -> GrayImage {
    let data = mask.values().iter().map(|&b| if b { 255 } else { 0 }).collect();
    GrayImage::from_raw(mask.width(), mask.height(), data).expect("sized from mask")
}

pub fn write_mask(path: &Path, mask: &Mask) -> Result<()> {
    mask_to_gray(mask).save(path)?;
    Ok(())
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

fn parse_sidecar(text: &str) -> Result<f64> {
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ParseError::line(i + 1, "expected key = value").into());
        };
        if key.trim() == "millimeters_per_unit" {
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| ParseError::line(i + 1, format!("invalid number {:?}", value.trim())))?;
            if !(v.is_finite() && v > 0.0) {
                return Err(ParseError::line(i + 1, "millimeters_per_unit must be positive").into());
            }
            return Ok(v);
        }
    }
    Err(ParseError::line(0, "missing millimeters_per_unit").into())
}

pub fn parse_depth_grid(text: &str) -> Result<DepthMap> {
    let mut width = None;
    let mut values = Vec::new();
    let mut rows = 0u32;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| ParseError::line(i + 1, format!("invalid depth {t:?}")))
            })
            .collect::<std::result::Result<_, _>>()?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(ParseError::line(
                    i + 1,
                    format!("row has {} values, expected {w}", row.len()),
                )
                .into())
            }
            _ => {}
        }
        values.extend(row);
        rows += 1;
    }
    let width = width.ok_or_else(|| Error::from(ParseError::line(0, "empty depth grid")))?;
    DepthMap::from_vec(width as u32, rows, values)
}

pub fn format_depth_grid(depth: &DepthMap) -> String {
    let mut out = String::new();
    for row in depth.values().chunks(depth.width().max(1) as usize) {
        let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn depth_from_png16(
    img: &ImageBuffer<Luma<u16>, Vec<u16>>,
    millimeters_per_unit: f64,
) -> DepthMap {
    let values = img
        .pixels()
        .map(|p| p.0[0] as f64 * millimeters_per_unit / 1000.0)
        .collect();
    DepthMap::from_vec(img.width(), img.height(), values).expect("sized from image")
}

pub fn read_depth(path: &Path) -> Result<DepthMap> {
    let is_png = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("png"));
    if is_png {
        let sidecar = sidecar_path(path);
        let meta = String::from_utf8_lossy(&read_file(&sidecar)?).into_owned();
        let mpu = parse_sidecar(&meta).map_err(|e| e.in_file(&sidecar))?;
        let img = image::open(path).map_err(|e| Error::from(e).in_file(path))?;
        Ok(depth_from_png16(&img.to_luma16(), mpu))
    } else {
        let text = String::from_utf8_lossy(&read_file(path)?).into_owned();
        parse_depth_grid(&text).map_err(|e| e.in_file(path))
    }
}

/// Writes a depth map as a 16-bit PNG plus sidecar; values are quantized.
pub fn write_depth_png(path: &Path, depth: &DepthMap, millimeters_per_unit: f64) -> Result<()> {
    let data = depth
        .values()
        .iter()
        .map(|v| (v * 1000.0 / millimeters_per_unit).round().clamp(0.0, u16::MAX as f64) as u16)
        .collect();
    let img: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_raw(depth.width(), depth.height(), data).expect("sized from depth");
    img.save(path)?;
    std::fs::write(
        sidecar_path(path),
        format!("millimeters_per_unit = {millimeters_per_unit:?}\n"),
    )?;
    Ok(())
}

pub fn read_rgb(path: &Path) -> Result<RgbImage> {
    let img = image::open(path).map_err(|e| Error::from(e).in_file(path))?;
    Ok(img.to_rgb8())
}

pub fn encode_png(img: &RgbImage) -> Result<Vec<u8>> {
    let mut out = std::io::Cursor::new(Vec::new());
    img.write_to(&mut out, image::ImageFormat::Png)?;
    Ok(out.into_inner())
}

pub fn decode_png(bytes: &[u8]) -> Result<RgbImage> {
    Ok(image::load_from_memory_with_format(bytes, image::ImageFormat::Png)?.to_rgb8())
}

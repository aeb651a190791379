//! `TRK1` point tracks: magic, u32 frame count `L`, u32 point count `N`,
//! then `L * N * 3` little-endian f32, frame-major.

use std::path::Path;

use nalgebra::Point3;

use super::{read_file, ByteReader, ReadOptions};
use crate::error::{Error, ParseError, Result};

pub const TRACKS_MAGIC: &[u8; 4] = b"TRK1";

/// World positions indexed `[frame * points + point]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackSet {
    pub frames: usize,
    pub points: usize,
    pub positions: Vec<Point3<f64>>,
}

impl TrackSet {
    pub fn new(frames: usize, points: usize, positions: Vec<Point3<f64>>) -> Result<Self> {
        if positions.len() != frames * points {
            return Err(Error::invalid(format!(
                "{frames} frames x {points} points needs {} positions, got {}",
                frames * points,
                positions.len()
            )));
        }
        Ok(TrackSet {
            frames,
            points,
            positions,
        })
    }

    /// Builds from per-point tracks, all of the same length.
    pub fn from_per_point(tracks: &[Vec<Point3<f64>>]) -> Result<Self> {
        let frames = tracks.first().map_or(0, Vec::len);
        if tracks.iter().any(|t| t.len() != frames) {
            return Err(Error::invalid("tracks differ in length"));
        }
        let positions = (0..frames)
            .flat_map(|l| tracks.iter().map(move |t| t[l]))
            .collect();
        Self::new(frames, tracks.len(), positions)
    }

    pub fn at(&self, frame: usize, point: usize) -> Point3<f64> {
        self.positions[frame * self.points + point]
    }

    pub fn per_point(&self) -> Vec<Vec<Point3<f64>>> {
        (0..self.points)
            .map(|n| (0..self.frames).map(|l| self.at(l, n)).collect())
            .collect()
    }
}

pub fn parse_tracks(bytes: &[u8], opts: ReadOptions) -> Result<TrackSet> {
    let mut r = ByteReader::new(bytes);
    let magic: [u8; 4] = r.take()?;
    if &magic != TRACKS_MAGIC {
        return Err(ParseError::BadMagic { offset: 0 }.into());
    }
    let frames = r.u32()? as u64;
    let points = r.u32()? as u64;
    r.require((frames * points).saturating_mul(12))?;
    let mut positions = Vec::with_capacity((frames * points) as usize);
    for _ in 0..frames * points {
        let x = r.finite_f32()?;
        let y = r.finite_f32()?;
        let z = r.finite_f32()?;
        positions.push(Point3::new(x as f64, y as f64, z as f64));
    }
    r.finish(opts)?;
    TrackSet::new(frames as usize, points as usize, positions)
}

pub fn read_tracks_file(path: &Path) -> Result<TrackSet> {
    read_tracks_with(path, ReadOptions::default())
}

pub fn read_tracks_with(path: &Path, opts: ReadOptions) -> Result<TrackSet> {
    let bytes = read_file(path)?;
    parse_tracks(&bytes, opts).map_err(|e| e.in_file(path))
}

/// Positions are narrowed to f32.
pub fn encode_tracks(tracks: &TrackSet) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + tracks.positions.len() * 12);
    out.extend_from_slice(TRACKS_MAGIC);
    out.extend_from_slice(&(tracks.frames as u32).to_le_bytes());
    out.extend_from_slice(&(tracks.points as u32).to_le_bytes());
    for p in &tracks.positions {
        for c in [p.x, p.y, p.z] {
            out.extend_from_slice(&(c as f32).to_le_bytes());
        }
    }
    out
}

pub fn write_tracks(path: &Path, tracks: &TrackSet) -> Result<()> {
    std::fs::write(path, encode_tracks(tracks))?;
    Ok(())
}

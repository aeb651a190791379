//! Pose text files, one frame per line. A line holds either 12 floats (the
//! world-to-camera `[R|t]` matrix, row-major) or 7 floats
//! (`tx ty tz qx qy qz qw`, camera-to-world, as written by common
//! visual-odometry tools). Blank lines and `#` comments are skipped.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{Matrix3, Point3, Quaternion, UnitQuaternion, Vector3};

use super::read_file;
use crate::error::{Error, ParseError, Result};
use crate::scene::{CameraIntrinsics, CameraPose};

/// Allowed deviation of a quaternion's norm from 1 before it is rejected.
pub const QUATERNION_NORM_TOLERANCE: f64 = 1e-3;

fn parse_floats(line: &str, line_no: usize) -> Result<Vec<f64>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| ParseError::line(line_no, format!("invalid number {tok:?}")).into())
        })
        .collect()
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn pose_from_values(values: &[f64], line_no: usize) -> Result<CameraPose> {
    match values.len() {
        12 => {
            let rotation = Matrix3::new(
                values[0], values[1], values[2], values[4], values[5], values[6], values[8],
                values[9], values[10],
            );
            let translation = Vector3::new(values[3], values[7], values[11]);
            CameraPose::new(rotation, translation)
                .map_err(|e| Error::InvalidPose(format!("line {line_no}: {e}")))
        }
        7 => {
            let center = Point3::new(values[0], values[1], values[2]);
            let q = Quaternion::new(values[6], values[3], values[4], values[5]);
            let norm = q.norm();
            if (norm - 1.0).abs() > QUATERNION_NORM_TOLERANCE {
                return Err(Error::InvalidPose(format!(
                    "line {line_no}: quaternion norm {norm} is not 1"
                )));
            }
            let orientation = UnitQuaternion::from_quaternion(q).to_rotation_matrix();
            let pose = CameraPose::from_center(*orientation.matrix(), center);
            pose.check_rotation()
                .map_err(|e| Error::InvalidPose(format!("line {line_no}: {e}")))?;
            Ok(pose)
        }
        n => Err(ParseError::line(line_no, format!("expected 12 or 7 floats, found {n}")).into()),
    }
}

pub fn parse_poses(text: &str) -> Result<Vec<CameraPose>> {
    content_lines(text)
        .map(|(n, line)| pose_from_values(&parse_floats(line, n)?, n))
        .collect()
}

pub fn read_poses_file(path: &Path) -> Result<Vec<CameraPose>> {
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes)
        .map_err(|e| Error::from(ParseError::line(0, format!("not UTF-8: {e}"))).in_file(path))?;
    parse_poses(&text).map_err(|e| e.in_file(path))
}

/// 12-float lines at full round-trip precision.
pub fn format_poses<'a>(poses: impl IntoIterator<Item = &'a CameraPose>) -> String {
    let mut out = String::new();
    for p in poses {
        let r = &p.rotation;
        let t = &p.translation;
        let vals = [
            r[(0, 0)],
            r[(0, 1)],
            r[(0, 2)],
            t.x,
            r[(1, 0)],
            r[(1, 1)],
            r[(1, 2)],
            t.y,
            r[(2, 0)],
            r[(2, 1)],
            r[(2, 2)],
            t.z,
        ];
        let line: Vec<String> = vals.iter().map(|v| format!("{v:?}")).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

pub fn write_poses<'a>(path: &Path, poses: impl IntoIterator<Item = &'a CameraPose>) -> Result<()> {
    std::fs::write(path, format_poses(poses))?;
    Ok(())
}

/// Per-frame intrinsics, `fx fy cx cy` per line.
pub fn format_intrinsics<'a>(ks: impl IntoIterator<Item = &'a CameraIntrinsics>) -> String {
    let mut out = String::new();
    for k in ks {
        let _ = writeln!(out, "{:?} {:?} {:?} {:?}", k.fx, k.fy, k.cx, k.cy);
    }
    out
}

pub fn parse_intrinsics(text: &str) -> Result<Vec<CameraIntrinsics>> {
    content_lines(text)
        .map(|(n, line)| {
            let v = parse_floats(line, n)?;
            if v.len() != 4 {
                return Err(ParseError::line(n, format!("expected 4 floats, found {}", v.len())).into());
            }
            Ok(CameraIntrinsics::new(v[0], v[1], v[2], v[3]))
        })
        .collect()
}

use nalgebra::{Point3, Vector3};

use crate::error::{Error, Result};
use crate::scene::{CameraIntrinsics, CameraPose};

/// Points at or closer than this camera-frame depth are treated as behind the camera.
pub const BEHIND_CAMERA_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub u: f64,
    pub v: f64,
    /// Camera-frame depth.
    pub z: f64,
}

/// Pinhole projection of a world point; `None` when the point is behind the camera.
pub fn project_point(
    intrinsics: &CameraIntrinsics,
    pose: &CameraPose,
    point: &Point3<f64>,
) -> Option<Projection> {
    let cam = pose.rotation * point.coords + pose.translation;
    if !(cam.z > BEHIND_CAMERA_EPS) {
        return None;
    }
    Some(Projection {
        u: intrinsics.fx * cam.x / cam.z + intrinsics.cx,
        v: intrinsics.fy * cam.y / cam.z + intrinsics.cy,
        z: cam.z,
    })
}

/// Inverse of [`project_point`] for a pixel position at camera-frame depth `depth`.
pub fn unproject_pixel(
    intrinsics: &CameraIntrinsics,
    pose: &CameraPose,
    u: f64,
    v: f64,
    depth: f64,
) -> Result<Point3<f64>> {
    if !(depth > 0.0 && depth.is_finite()) {
        return Err(Error::invalid(format!("unprojection depth must be positive, got {depth}")));
    }
    let cam = Vector3::new(
        (u - intrinsics.cx) / intrinsics.fx * depth,
        (v - intrinsics.cy) / intrinsics.fy * depth,
        depth,
    );
    Ok(Point3::from(
        pose.rotation.transpose() * (cam - pose.translation),
    ))
}

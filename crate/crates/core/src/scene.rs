//! Representation types for one clip and the steps that build them from raw
//! tracks and poses.
//!
//! Conventions used throughout the crate:
//!
//! * extrinsics map world to camera, `x_cam = R * x_world + t`;
//! * the world frame is the camera frame of frame 1, so a valid trajectory
//!   starts at the identity pose;
//! * the camera looks down `+z` with `x` to the right and `y` down, matching
//!   image `u`/`v`;
//! * frame indices in public APIs are 1-based.

use nalgebra::{Matrix3, Point2, Point3, Vector3};

use crate::error::{Error, Result};
use crate::render::projection::project_point;

pub type Rgb = [u8; 3];

pub const ROTATION_TOLERANCE: f64 = 1e-6;
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

impl CameraIntrinsics {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64) -> Self {
        CameraIntrinsics { fx, fy, cx, cy }
    }

    /// `fx = W`, `fy = H`, principal point at `(W // 2, H // 2)`.
    pub fn default_for(width: u32, height: u32) -> Result<Self> {
        if width < 2 || height < 2 {
            return Err(Error::invalid(format!(
                "image dimensions must be at least 2x2, got {width}x{height}"
            )));
        }
        Ok(CameraIntrinsics {
            fx: width as f64,
            fy: height as f64,
            cx: (width / 2) as f64,
            cy: (height / 2) as f64,
        })
    }

    /// Same principal point, focal lengths multiplied by `factor`.
    pub fn scaled_focal(&self, factor: f64) -> Self {
        CameraIntrinsics {
            fx: self.fx * factor,
            fy: self.fy * factor,
            ..*self
        }
    }

    fn check(&self, width: u32, height: u32, path: &str) -> Result<()> {
        let finite = [self.fx, self.fy, self.cx, self.cy]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.fx <= 0.0 || self.fy <= 0.0 {
            return Err(Error::semantic(path, "focal lengths must be finite and positive"));
        }
        if !(self.cx >= 0.0 && self.cx < width as f64 && self.cy >= 0.0 && self.cy < height as f64)
        {
            return Err(Error::semantic(path, "principal point lies outside the image"));
        }
        Ok(())
    }
}

pub fn default_intrinsics(width: u32, height: u32) -> Result<CameraIntrinsics> {
    CameraIntrinsics::default_for(width, height)
}

/// Rigid world-to-camera transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraPose {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl Default for CameraPose {
    fn default() -> Self {
        Self::identity()
    }
}

impl CameraPose {
    pub fn identity() -> Self {
        CameraPose {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    /// Validated constructor.
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self> {
        let pose = CameraPose {
            rotation,
            translation,
        };
        pose.check_rotation()?;
        if !translation.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidPose("translation is not finite".into()));
        }
        Ok(pose)
    }

    /// Pose of a camera centered at `center` whose camera-to-world rotation is `orientation`.
    pub fn from_center(orientation: Matrix3<f64>, center: Point3<f64>) -> Self {
        let rotation = orientation.transpose();
        CameraPose {
            rotation,
            translation: -(rotation * center.coords),
        }
    }

    /// Largest entry of `|RᵀR - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        (self.rotation.transpose() * self.rotation - Matrix3::identity()).amax()
    }

    pub fn check_rotation(&self) -> Result<()> {
        if !self.rotation.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidPose("rotation is not finite".into()));
        }
        let err = self.orthonormality_error();
        if err >= ROTATION_TOLERANCE {
            return Err(Error::InvalidPose(format!(
                "rotation is not orthonormal (max |RᵀR - I| = {err:e})"
            )));
        }
        if self.rotation.determinant() <= 0.0 {
            return Err(Error::InvalidPose("rotation has negative determinant".into()));
        }
        Ok(())
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &CameraPose) -> CameraPose {
        CameraPose {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> CameraPose {
        let rt = self.rotation.transpose();
        CameraPose {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    pub fn transform_point(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::from(self.rotation * p.coords + self.translation)
    }

    /// Camera center in world coordinates, `-Rᵀt`.
    pub fn center(&self) -> Point3<f64> {
        Point3::from(-(self.rotation.transpose() * self.translation))
    }

    pub fn approx_eq(&self, other: &CameraPose, tol: f64) -> bool {
        (self.rotation - other.rotation).amax() <= tol
            && (self.translation - other.translation).amax() <= tol
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.approx_eq(&CameraPose::identity(), tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraFrame {
    pub intrinsics: CameraIntrinsics,
    pub pose: CameraPose,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CameraTrajectory {
    frames: Vec<CameraFrame>,
}

impl CameraTrajectory {
    pub fn new(frames: Vec<CameraFrame>) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::invalid("trajectory needs at least one frame"));
        }
        for f in &frames {
            f.pose.check_rotation()?;
        }
        Ok(CameraTrajectory { frames })
    }

    /// `frames` copies of the identity pose.
    pub fn fixed(intrinsics: CameraIntrinsics, frames: usize) -> Result<Self> {
        Self::new(vec![
            CameraFrame {
                intrinsics,
                pose: CameraPose::identity(),
            };
            frames
        ])
    }

    pub fn from_parts(intrinsics: &[CameraIntrinsics], poses: &[CameraPose]) -> Result<Self> {
        if intrinsics.len() != poses.len() {
            return Err(Error::invalid(format!(
                "{} intrinsics for {} poses",
                intrinsics.len(),
                poses.len()
            )));
        }
        Self::new(
            intrinsics
                .iter()
                .zip(poses)
                .map(|(&intrinsics, &pose)| CameraFrame { intrinsics, pose })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frames(&self) -> &[CameraFrame] {
        &self.frames
    }

    /// 1-based frame lookup.
    pub fn frame(&self, index: usize) -> Result<&CameraFrame> {
        if index == 0 || index > self.frames.len() {
            return Err(Error::invalid(format!(
                "frame {index} out of range [1, {}]",
                self.frames.len()
            )));
        }
        Ok(&self.frames[index - 1])
    }

    pub fn poses(&self) -> impl Iterator<Item = &CameraPose> + '_ {
        self.frames.iter().map(|f| &f.pose)
    }

    pub fn map_poses(&self, f: impl Fn(&CameraPose) -> CameraPose) -> CameraTrajectory {
        CameraTrajectory {
            frames: self
                .frames
                .iter()
                .map(|fr| CameraFrame {
                    intrinsics: fr.intrinsics,
                    pose: f(&fr.pose),
                })
                .collect(),
        }
    }
}

/// Re-expresses a pose sequence relative to its first frame: `pose_l ∘ pose_1⁻¹`.
pub fn align_to_first_frame(raw: &[CameraPose]) -> Result<Vec<CameraPose>> {
    let first = raw
        .first()
        .ok_or_else(|| Error::invalid("cannot align an empty pose list"))?;
    for p in raw {
        p.check_rotation()?;
    }
    let base = first.inverse();
    Ok(raw
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if i == 0 {
                CameraPose::identity()
            } else {
                p.compose(&base)
            }
        })
        .collect())
}

/// Joint min-max normalization over every value passed in. A constant input maps to 0.5.
pub fn normalize_depths(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::invalid("no depths to normalize"));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("depth {i} is not finite")));
    }
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if hi == lo {
        return Ok(vec![0.5; values.len()]);
    }
    let span = hi - lo;
    Ok(values
        .iter()
        .map(|&v| ((v - lo) / span).clamp(0.0, 1.0))
        .collect())
}

/// Value of the two-axis color ramp at a pixel position, clamped to the image.
pub fn color_at(u: f64, v: f64, width: u32, height: u32) -> Rgb {
    let w1 = (width.max(2) - 1) as f64;
    let h1 = (height.max(2) - 1) as f64;
    let u = if u.is_nan() { 0.0 } else { u.clamp(0.0, w1) };
    let v = if v.is_nan() { 0.0 } else { v.clamp(0.0, h1) };
    [
        (255.0 * u / w1).round() as u8,
        (255.0 * v / h1).round() as u8,
        128,
    ]
}

pub fn assign_colors(centers: &[Point2<f64>], width: u32, height: u32) -> Vec<Rgb> {
    centers
        .iter()
        .map(|c| color_at(c.x, c.y, width, height))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sphere {
    pub id: u32,
    pub track: Vec<Point3<f64>>,
    pub normalized_depths: Vec<f64>,
    pub color: Rgb,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SphereSet {
    pub spheres: Vec<Sphere>,
}

impl SphereSet {
    pub fn len(&self) -> usize {
        self.spheres.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spheres.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Sphere> {
        self.spheres.iter()
    }

    pub fn get(&self, id: u32) -> Option<&Sphere> {
        self.spheres.iter().find(|s| s.id == id)
    }

    pub fn next_id(&self) -> u32 {
        self.spheres.iter().map(|s| s.id + 1).max().unwrap_or(0)
    }

    /// Recomputes every sphere's normalized depths jointly from the tracks' z values.
    pub fn renormalize(&mut self) -> Result<()> {
        let zs: Vec<f64> = self
            .spheres
            .iter()
            .flat_map(|s| s.track.iter().map(|p| p.z))
            .collect();
        if zs.is_empty() {
            return Ok(());
        }
        let normalized = normalize_depths(&zs)?;
        let mut it = normalized.into_iter();
        for s in &mut self.spheres {
            s.normalized_depths = it.by_ref().take(s.track.len()).collect();
        }
        Ok(())
    }
}

/// Face order used by [`WorldEnvelope::face_tints`].
pub const FACE_NAMES: [&str; 6] = ["+x", "-x", "+y", "-y", "+z", "-z"];

/// Checkerboard cube centered at the world origin.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldEnvelope {
    pub side_length: f64,
    pub checker_cell: f64,
    pub color_a: Rgb,
    pub color_b: Rgb,
    /// Per-face RGB multipliers in [`FACE_NAMES`] order; `None` leaves the face untinted.
    pub face_tints: [Option<[f64; 3]>; 6],
}

pub const DEFAULT_Z_FAR: f64 = 100.0;

impl Default for WorldEnvelope {
    fn default() -> Self {
        Self::with_side(DEFAULT_Z_FAR)
    }
}

impl WorldEnvelope {
    pub fn with_side(side_length: f64) -> Self {
        let x = [1.0, 0.85, 0.85];
        let y = [0.85, 1.0, 0.85];
        let z = [0.85, 0.9, 1.0];
        WorldEnvelope {
            side_length,
            checker_cell: side_length / 16.0,
            color_a: [255, 255, 255],
            color_b: [40, 40, 40],
            face_tints: [Some(x), Some(x), Some(y), Some(y), Some(z), Some(z)],
        }
    }

    pub fn half_side(&self) -> f64 {
        self.side_length / 2.0
    }

    /// Whether a camera center lies strictly inside the cube.
    pub fn contains(&self, p: &Point3<f64>) -> bool {
        p.coords.amax() < self.half_side()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.side_length.is_finite() && self.side_length > 0.0) {
            return Err(Error::semantic("envelope.side_length", "must be positive"));
        }
        if !(self.checker_cell.is_finite() && self.checker_cell > 0.0) {
            return Err(Error::semantic("envelope.checker_cell", "must be positive"));
        }
        if self.checker_cell > self.side_length {
            return Err(Error::semantic(
                "envelope.checker_cell",
                "must not exceed side_length",
            ));
        }
        for (i, t) in self.face_tints.iter().enumerate() {
            if let Some(t) = t {
                if t.iter().any(|c| !c.is_finite() || *c < 0.0) {
                    return Err(Error::semantic(
                        format!("envelope.face_tints[{i}]"),
                        "multipliers must be finite and nonnegative",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Circle radius bounds in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderParams {
    pub r_min: f64,
    pub r_max: f64,
}

impl RenderParams {
    /// 2 px to 14 px at a 512 px short side, scaled linearly with the short side.
    pub fn default_for(width: u32, height: u32) -> Self {
        let scale = width.min(height) as f64 / 512.0;
        RenderParams {
            r_min: 2.0 * scale,
            r_max: 14.0 * scale,
        }
    }

    /// Linear nearness rule: depth 0 gives `r_max`, depth 1 gives `r_min`.
    pub fn radius(&self, normalized_depth: f64) -> f64 {
        self.r_min + (self.r_max - self.r_min) * (1.0 - normalized_depth)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min.is_finite() && self.r_max.is_finite() && self.r_min >= 0.0) {
            return Err(Error::semantic(
                "render_params",
                "radii must be finite and nonnegative",
            ));
        }
        if self.r_min > self.r_max {
            return Err(Error::semantic("render_params", "r_min exceeds r_max"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotionScene {
    pub width: u32,
    pub height: u32,
    pub trajectory: CameraTrajectory,
    pub spheres: SphereSet,
    pub envelope: WorldEnvelope,
    pub render_params: RenderParams,
}

impl MotionScene {
    pub fn frame_count(&self) -> usize {
        self.trajectory.len()
    }

    /// Checks every type invariant, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::semantic("width/height", "must be positive"));
        }
        self.render_params.validate()?;
        self.envelope.validate()?;
        let frames = self.trajectory.frames();
        if frames.is_empty() {
            return Err(Error::semantic("trajectory", "needs at least one frame"));
        }
        for (i, f) in frames.iter().enumerate() {
            f.intrinsics
                .check(self.width, self.height, &format!("trajectory[{i}].intrinsics"))?;
            if let Err(e) = f.pose.check_rotation() {
                return Err(Error::semantic(format!("trajectory[{i}].pose"), e.to_string()));
            }
            if !f.pose.translation.iter().all(|v| v.is_finite()) {
                return Err(Error::semantic(
                    format!("trajectory[{i}].pose.translation"),
                    "not finite",
                ));
            }
        }
        if !frames[0].pose.is_identity(IDENTITY_TOLERANCE) {
            return Err(Error::semantic(
                "trajectory[0].pose",
                "first frame must be the identity pose",
            ));
        }
        let l = frames.len();
        let mut seen = std::collections::HashSet::new();
        for (i, s) in self.spheres.iter().enumerate() {
            let path = format!("spheres[{i}]");
            if !seen.insert(s.id) {
                return Err(Error::semantic(format!("{path}.id"), "duplicate sphere id"));
            }
            if s.track.len() != l {
                return Err(Error::semantic(
                    format!("{path}.track"),
                    format!("has {} positions, trajectory has {l} frames", s.track.len()),
                ));
            }
            if s.track.iter().any(|p| !p.coords.iter().all(|c| c.is_finite())) {
                return Err(Error::semantic(format!("{path}.track"), "not finite"));
            }
            if s.normalized_depths.len() != l {
                return Err(Error::semantic(
                    format!("{path}.normalized_depths"),
                    format!("has {} values, expected {l}", s.normalized_depths.len()),
                ));
            }
            if s.normalized_depths.iter().any(|d| !(0.0..=1.0).contains(d)) {
                return Err(Error::semantic(
                    format!("{path}.normalized_depths"),
                    "values must lie in [0, 1]",
                ));
            }
        }
        Ok(())
    }

    /// Frame-1 projected center of a track start; behind-camera starts fall back
    /// to the principal point.
    pub fn first_frame_center(&self, start: &Point3<f64>) -> Point2<f64> {
        let f = &self.trajectory.frames()[0];
        match project_point(&f.intrinsics, &f.pose, start) {
            Some(p) => Point2::new(p.u, p.v),
            None => Point2::new(f.intrinsics.cx, f.intrinsics.cy),
        }
    }

    pub fn color_for_start(&self, start: &Point3<f64>) -> Rgb {
        let c = self.first_frame_center(start);
        color_at(c.x, c.y, self.width, self.height)
    }

    /// Fails with the first 1-based frame whose camera center is not strictly inside the envelope.
    pub fn check_envelope(&self) -> Result<()> {
        match self
            .trajectory
            .poses()
            .position(|p| !self.envelope.contains(&p.center()))
        {
            Some(i) => Err(Error::CameraEscapedEnvelope { frame: i + 1 }),
            None => Ok(()),
        }
    }
}

/// Builds and validates a scene from per-sphere world tracks (`tracks[n][l]`).
///
/// Sphere ids are assigned in input order starting at 0.
pub fn build_scene(
    width: u32,
    height: u32,
    trajectory: CameraTrajectory,
    tracks: &[Vec<Point3<f64>>],
    envelope: WorldEnvelope,
    render_params: RenderParams,
) -> Result<MotionScene> {
    if width == 0 || height == 0 {
        return Err(Error::invalid("image dimensions must be positive"));
    }
    let l = trajectory.len();
    if let Some((n, t)) = tracks.iter().enumerate().find(|(_, t)| t.len() != l) {
        return Err(Error::invalid(format!(
            "track {n} has {} frames, trajectory has {l}",
            t.len()
        )));
    }
    let mut scene = MotionScene {
        width,
        height,
        trajectory,
        spheres: SphereSet::default(),
        envelope,
        render_params,
    };
    let zs: Vec<f64> = tracks.iter().flatten().map(|p| p.z).collect();
    let depths = if zs.is_empty() {
        Vec::new()
    } else {
        normalize_depths(&zs)?
    };
    let centers: Vec<Point2<f64>> = tracks
        .iter()
        .map(|t| scene.first_frame_center(&t[0]))
        .collect();
    let colors = assign_colors(&centers, width, height);
    scene.spheres.spheres = tracks
        .iter()
        .zip(depths.chunks(l.max(1)))
        .zip(colors)
        .enumerate()
        .map(|(i, ((track, d), color))| Sphere {
            id: i as u32,
            track: track.clone(),
            normalized_depths: d.to_vec(),
            color,
        })
        .collect();
    scene.validate()?;
    Ok(scene)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Rotation3;

    fn random_pose(seed: u64) -> CameraPose {
        let a = seed as f64 * 0.37;
        let r = Rotation3::from_euler_angles(a.sin(), 0.3 * a.cos(), a * 0.11);
        CameraPose::new(
            *r.matrix(),
            Vector3::new(a.cos(), -0.5 * a.sin(), 0.2 * a),
        )
        .unwrap()
    }

    #[test]
    fn default_intrinsics_uses_floor_division() {
        let k = default_intrinsics(768, 512).unwrap();
        assert_eq!((k.fx, k.fy, k.cx, k.cy), (768.0, 512.0, 384.0, 256.0));
        let k = default_intrinsics(2, 2).unwrap();
        assert_eq!((k.fx, k.fy, k.cx, k.cy), (2.0, 2.0, 1.0, 1.0));
        let k = default_intrinsics(7, 5).unwrap();
        assert_eq!((k.cx, k.cy), (3.0, 2.0));
        assert!(matches!(
            default_intrinsics(0, 512),
            Err(Error::InvalidArgument(_))
        ));
        assert!(default_intrinsics(1, 512).is_err());
    }

    #[test]
    fn align_examples() {
        let p = random_pose(3);
        let out = align_to_first_frame(&[p, p]).unwrap();
        assert!(out.iter().all(|q| q.is_identity(1e-9)));

        let t = CameraPose::new(Matrix3::identity(), Vector3::new(0.0, 0.0, -1.0)).unwrap();
        let out = align_to_first_frame(&[CameraPose::identity(), t]).unwrap();
        assert!(out[0].is_identity(1e-12));
        assert!(out[1].approx_eq(&t, 1e-12));

        assert!(matches!(
            align_to_first_frame(&[]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn align_rejects_non_orthonormal() {
        let bad = CameraPose {
            rotation: Matrix3::identity() * 1.1,
            translation: Vector3::zeros(),
        };
        assert!(matches!(
            align_to_first_frame(&[CameraPose::identity(), bad]),
            Err(Error::InvalidPose(_))
        ));
    }

    #[test]
    fn align_is_idempotent() {
        let raw: Vec<_> = (0..6).map(random_pose).collect();
        let once = align_to_first_frame(&raw).unwrap();
        let twice = align_to_first_frame(&once).unwrap();
        for (a, b) in once.iter().zip(&twice) {
            assert!(a.approx_eq(b, 1e-9));
        }
    }

    #[test]
    fn pose_inverse_composes_to_identity() {
        for s in 0..20 {
            let p = random_pose(s);
            assert!(p.compose(&p.inverse()).is_identity(1e-9));
            assert!(p.inverse().compose(&p).is_identity(1e-9));
        }
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_depths(&[2.0, 4.0, 6.0]).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(normalize_depths(&[3.0, 3.0]).unwrap(), vec![0.5, 0.5]);
        assert!(normalize_depths(&[1.0, f64::NAN]).is_err());
        assert!(normalize_depths(&[1.0, f64::INFINITY]).is_err());
        assert!(normalize_depths(&[]).is_err());
    }

    #[test]
    fn color_examples() {
        assert_eq!(color_at(0.0, 0.0, 768, 512), [0, 0, 128]);
        assert_eq!(color_at(767.0, 511.0, 768, 512), [255, 255, 128]);
        assert_eq!(color_at(384.0, 256.0, 768, 512), [128, 128, 128]);
        // clamped
        assert_eq!(color_at(-20.0, 900.0, 768, 512), [0, 255, 128]);
        let cs = assign_colors(&[Point2::new(0.0, 0.0), Point2::new(767.0, 511.0)], 768, 512);
        assert_eq!(cs, vec![[0, 0, 128], [255, 255, 128]]);
    }

    #[test]
    fn color_distinct_at_stated_granularity() {
        let (w, h) = (768u32, 512u32);
        let du = ((w - 1) as f64 / 255.0).ceil();
        let dv = ((h - 1) as f64 / 255.0).ceil();
        let mut u = 0.0;
        while u + du <= (w - 1) as f64 {
            assert_ne!(color_at(u, 10.0, w, h), color_at(u + du, 10.0, w, h));
            u += 0.75;
        }
        let mut v = 0.0;
        while v + dv <= (h - 1) as f64 {
            assert_ne!(color_at(5.0, v, w, h), color_at(5.0, v + dv, w, h));
            v += 0.5;
        }
    }

    #[test]
    fn build_scene_examples() {
        let k = default_intrinsics(768, 512).unwrap();
        let traj = CameraTrajectory::fixed(k, 1).unwrap();
        let scene = build_scene(
            768,
            512,
            traj,
            &[vec![Point3::new(0.0, 0.0, 4.0)]],
            WorldEnvelope::default(),
            RenderParams::default_for(768, 512),
        )
        .unwrap();
        assert_eq!(scene.frame_count(), 1);
        assert_eq!(scene.spheres.len(), 1);
        assert_eq!(scene.spheres.spheres[0].normalized_depths, vec![0.5]);
        assert_eq!(scene.spheres.spheres[0].color, [128, 128, 128]);

        let traj = CameraTrajectory::fixed(k, 16).unwrap();
        let tracks: Vec<Vec<Point3<f64>>> = (0..625)
            .map(|n| {
                (0..16)
                    .map(|l| Point3::new(n as f64 * 0.01, 0.0, 3.0 + l as f64 * 0.1))
                    .collect()
            })
            .collect();
        let scene = build_scene(
            768,
            512,
            traj.clone(),
            &tracks,
            WorldEnvelope::default(),
            RenderParams::default_for(768, 512),
        )
        .unwrap();
        assert_eq!(scene.spheres.len(), 625);

        let short: Vec<Vec<Point3<f64>>> = vec![vec![Point3::new(0.0, 0.0, 1.0); 8]];
        assert!(matches!(
            build_scene(
                768,
                512,
                traj,
                &short,
                WorldEnvelope::default(),
                RenderParams::default_for(768, 512)
            ),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn validate_names_render_params() {
        let k = default_intrinsics(64, 64).unwrap();
        let err = build_scene(
            64,
            64,
            CameraTrajectory::fixed(k, 1).unwrap(),
            &[],
            WorldEnvelope::default(),
            RenderParams {
                r_min: 5.0,
                r_max: 1.0,
            },
        )
        .unwrap_err();
        match err {
            Error::Semantic { path, .. } => assert_eq!(path, "render_params"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn default_render_params_scale_with_short_side() {
        let p = RenderParams::default_for(768, 512);
        assert_eq!((p.r_min, p.r_max), (2.0, 14.0));
        let p = RenderParams::default_for(2048, 1024);
        assert_eq!((p.r_min, p.r_max), (4.0, 28.0));
    }
}

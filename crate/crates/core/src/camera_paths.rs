//! Preset camera moves, their composition, and trajectory error metrics.
//!
//! Directions follow the camera convention of [`crate::scene`]: `+x` right,
//! `+y` down, `+z` forward. Rotational presets turn the viewing direction,
//! translational presets move the camera center, zoom presets only change
//! the focal length.

use nalgebra::{Matrix3, Point3, Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene::{CameraFrame, CameraIntrinsics, CameraPose, CameraTrajectory, DEFAULT_Z_FAR};

pub const DEFAULT_PIVOT_DISTANCE: f64 = DEFAULT_Z_FAR / 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    PanLeft,
    PanRight,
    TiltUp,
    TiltDown,
    DollyIn,
    DollyOut,
    TruckLeft,
    TruckRight,
    PedestalUp,
    PedestalDown,
    OrbitLeft,
    OrbitRight,
    ZoomIn,
    ZoomOut,
    Static,
}

impl MoveKind {
    pub const ALL: [MoveKind; 15] = [
        MoveKind::PanLeft,
        MoveKind::PanRight,
        MoveKind::TiltUp,
        MoveKind::TiltDown,
        MoveKind::DollyIn,
        MoveKind::DollyOut,
        MoveKind::TruckLeft,
        MoveKind::TruckRight,
        MoveKind::PedestalUp,
        MoveKind::PedestalDown,
        MoveKind::OrbitLeft,
        MoveKind::OrbitRight,
        MoveKind::ZoomIn,
        MoveKind::ZoomOut,
        MoveKind::Static,
    ];

    pub fn is_zoom(self) -> bool {
        matches!(self, MoveKind::ZoomIn | MoveKind::ZoomOut)
    }

    pub fn is_translation(self) -> bool {
        matches!(
            self,
            MoveKind::DollyIn
                | MoveKind::DollyOut
                | MoveKind::TruckLeft
                | MoveKind::TruckRight
                | MoveKind::PedestalUp
                | MoveKind::PedestalDown
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            MoveKind::PanLeft => "pan_left",
            MoveKind::PanRight => "pan_right",
            MoveKind::TiltUp => "tilt_up",
            MoveKind::TiltDown => "tilt_down",
            MoveKind::DollyIn => "dolly_in",
            MoveKind::DollyOut => "dolly_out",
            MoveKind::TruckLeft => "truck_left",
            MoveKind::TruckRight => "truck_right",
            MoveKind::PedestalUp => "pedestal_up",
            MoveKind::PedestalDown => "pedestal_down",
            MoveKind::OrbitLeft => "orbit_left",
            MoveKind::OrbitRight => "orbit_right",
            MoveKind::ZoomIn => "zoom_in",
            MoveKind::ZoomOut => "zoom_out",
            MoveKind::Static => "static",
        }
    }
}

impl std::str::FromStr for MoveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        MoveKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| Error::invalid(format!("unknown camera move {s:?}")))
    }
}

/// A preset move: total angle in degrees (pan, tilt, orbit), total distance
/// in world units (dolly, truck, pedestal), or focal multiplier (zoom).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraMoveSpec {
    pub kind: MoveKind,
    #[serde(default)]
    pub magnitude: f64,
    pub frames: usize,
    /// Orbit pivot distance along the initial principal ray.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pivot_distance: Option<f64>,
}

impl CameraMoveSpec {
    pub fn new(kind: MoveKind, magnitude: f64, frames: usize) -> Self {
        CameraMoveSpec {
            kind,
            magnitude,
            frames,
            pivot_distance: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.frames == 0 {
            return Err(Error::invalid("camera move needs at least one frame"));
        }
        if !self.magnitude.is_finite() {
            return Err(Error::invalid("camera move magnitude must be finite"));
        }
        if self.kind.is_zoom() && self.magnitude <= 0.0 {
            return Err(Error::invalid("zoom multiplier must be positive"));
        }
        if let Some(d) = self.pivot_distance {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::invalid("orbit pivot distance must be positive"));
            }
        }
        Ok(())
    }
}

/// Camera-to-world rotation about `+y`.
fn yaw(angle: f64) -> Matrix3<f64> {
    *Rotation3::from_axis_angle(&Vector3::y_axis(), angle).matrix()
}

fn pitch(angle: f64) -> Matrix3<f64> {
    *Rotation3::from_axis_angle(&Vector3::x_axis(), angle).matrix()
}

fn pose_at(spec: &CameraMoveSpec, fraction: f64) -> CameraPose {
    let angle = (spec.magnitude * fraction).to_radians();
    let dist = spec.magnitude * fraction;
    let from_center = |dir: Vector3<f64>| {
        CameraPose::from_center(Matrix3::identity(), Point3::from(dir * dist))
    };
    match spec.kind {
        MoveKind::Static | MoveKind::ZoomIn | MoveKind::ZoomOut => CameraPose::identity(),
        // +y rotation turns the view toward +x
        MoveKind::PanLeft => CameraPose::from_center(yaw(-angle), Point3::origin()),
        MoveKind::PanRight => CameraPose::from_center(yaw(angle), Point3::origin()),
        // +x rotation turns the view toward -y, which is up
        MoveKind::TiltUp => CameraPose::from_center(pitch(angle), Point3::origin()),
        MoveKind::TiltDown => CameraPose::from_center(pitch(-angle), Point3::origin()),
        MoveKind::DollyIn => from_center(Vector3::z()),
        MoveKind::DollyOut => from_center(-Vector3::z()),
        MoveKind::TruckLeft => from_center(-Vector3::x()),
        MoveKind::TruckRight => from_center(Vector3::x()),
        MoveKind::PedestalUp => from_center(-Vector3::y()),
        MoveKind::PedestalDown => from_center(Vector3::y()),
        MoveKind::OrbitLeft | MoveKind::OrbitRight => {
            let theta = if spec.kind == MoveKind::OrbitLeft {
                angle
            } else {
                -angle
            };
            let d = spec.pivot_distance.unwrap_or(DEFAULT_PIVOT_DISTANCE);
            let pivot = Point3::new(0.0, 0.0, d);
            let orientation = yaw(theta);
            let center = pivot - orientation * Vector3::new(0.0, 0.0, d);
            CameraPose::from_center(orientation, center)
        }
    }
}

fn focal_factor(spec: &CameraMoveSpec, fraction: f64) -> f64 {
    match spec.kind {
        MoveKind::ZoomIn => spec.magnitude.powf(fraction),
        MoveKind::ZoomOut => spec.magnitude.powf(-fraction),
        _ => 1.0,
    }
}

/// Linear interpolation of the move parameter (log-linear for zoom) from 0 at
/// frame 1 to the full magnitude at the last frame.
pub fn generate(spec: &CameraMoveSpec, base: CameraIntrinsics) -> Result<CameraTrajectory> {
    spec.validate()?;
    let last = spec.frames.saturating_sub(1).max(1) as f64;
    let frames = (0..spec.frames)
        .map(|l| {
            let fraction = l as f64 / last;
            CameraFrame {
                intrinsics: base.scaled_focal(focal_factor(spec, fraction)),
                pose: if l == 0 {
                    CameraPose::identity()
                } else {
                    pose_at(spec, fraction)
                },
            }
        })
        .collect();
    CameraTrajectory::new(frames)
}

/// Per-frame `pose_b ∘ pose_a`; focal lengths take `a`'s values times `b`'s
/// multiplier relative to its first frame.
pub fn compose(a: &CameraTrajectory, b: &CameraTrajectory) -> Result<CameraTrajectory> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "cannot compose trajectories of {} and {} frames",
            a.len(),
            b.len()
        )));
    }
    let b0 = b.frames()[0].intrinsics;
    let frames = a
        .frames()
        .iter()
        .zip(b.frames())
        .map(|(fa, fb)| CameraFrame {
            intrinsics: CameraIntrinsics {
                fx: fa.intrinsics.fx * (fb.intrinsics.fx / b0.fx),
                fy: fa.intrinsics.fy * (fb.intrinsics.fy / b0.fy),
                ..fa.intrinsics
            },
            pose: fb.pose.compose(&fa.pose),
        })
        .collect();
    CameraTrajectory::new(frames)
}

/// Geodesic angle between two rotations, in degrees. Computed as
/// `atan2(sin, cos)` of the relative rotation, which stays exact near 0 and 180.
pub fn rotation_angle_deg(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
    let r = a.transpose() * b;
    let cos = ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    let sin = Vector3::new(
        r[(2, 1)] - r[(1, 2)],
        r[(0, 2)] - r[(2, 0)],
        r[(1, 0)] - r[(0, 1)],
    )
    .norm()
        / 2.0;
    sin.atan2(cos).to_degrees()
}

fn check_same_len(gt: &CameraTrajectory, pred: &CameraTrajectory) -> Result<()> {
    if gt.len() != pred.len() {
        return Err(Error::invalid(format!(
            "trajectories have {} and {} frames",
            gt.len(),
            pred.len()
        )));
    }
    Ok(())
}

/// Mean per-frame geodesic rotation error in degrees.
pub fn rot_err(gt: &CameraTrajectory, pred: &CameraTrajectory) -> Result<f64> {
    check_same_len(gt, pred)?;
    let total: f64 = gt
        .poses()
        .zip(pred.poses())
        .map(|(g, p)| rotation_angle_deg(&g.rotation, &p.rotation))
        .sum();
    Ok(total / gt.len() as f64)
}

fn normalized_centers(t: &CameraTrajectory) -> Vec<Vector3<f64>> {
    let centers: Vec<Vector3<f64>> = t.poses().map(|p| p.center().coords).collect();
    let scale = centers.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale < 1e-9 {
        centers
    } else {
        centers.into_iter().map(|c| c / scale).collect()
    }
}

/// Mean distance between camera centers after scaling each trajectory by its
/// largest center norm.
pub fn trans_err(gt: &CameraTrajectory, pred: &CameraTrajectory) -> Result<f64> {
    check_same_len(gt, pred)?;
    let g = normalized_centers(gt);
    let p = normalized_centers(pred);
    let total: f64 = g.iter().zip(&p).map(|(a, b)| (a - b).norm()).sum();
    Ok(total / gt.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::render::project_point;
    use crate::scene::default_intrinsics;

    fn base() -> CameraIntrinsics {
        default_intrinsics(768, 512).unwrap()
    }

    fn forward(p: &CameraPose) -> Vector3<f64> {
        p.rotation.transpose() * Vector3::z()
    }

    #[test]
    fn static_move() {
        let t = generate(&CameraMoveSpec::new(MoveKind::Static, 0.0, 16), base()).unwrap();
        assert_eq!(t.len(), 16);
        for f in t.frames() {
            assert!(f.pose.is_identity(0.0));
            assert_eq!(f.intrinsics, base());
        }
    }

    #[test]
    fn pan_left_angles() {
        let t = generate(&CameraMoveSpec::new(MoveKind::PanLeft, 30.0, 4), base()).unwrap();
        for (l, f) in t.frames().iter().enumerate() {
            let angle = rotation_angle_deg(&Matrix3::identity(), &f.pose.rotation);
            assert!((angle - 10.0 * l as f64).abs() < 1e-9, "frame {l}: {angle}");
            assert!(f.pose.center().coords.norm() < 1e-12);
            if l > 0 {
                let fw = forward(&f.pose);
                assert!(fw.x < 0.0 && fw.y.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tilt_up_looks_toward_negative_y() {
        let t = generate(&CameraMoveSpec::new(MoveKind::TiltUp, 20.0, 3), base()).unwrap();
        assert!(forward(&t.frames()[2].pose).y < 0.0);
        let t = generate(&CameraMoveSpec::new(MoveKind::TiltDown, 20.0, 3), base()).unwrap();
        assert!(forward(&t.frames()[2].pose).y > 0.0);
    }

    #[test]
    fn translational_moves_end_at_magnitude() {
        let cases = [
            (MoveKind::DollyIn, Vector3::new(0.0, 0.0, 3.0)),
            (MoveKind::DollyOut, Vector3::new(0.0, 0.0, -3.0)),
            (MoveKind::TruckLeft, Vector3::new(-3.0, 0.0, 0.0)),
            (MoveKind::TruckRight, Vector3::new(3.0, 0.0, 0.0)),
            (MoveKind::PedestalUp, Vector3::new(0.0, -3.0, 0.0)),
            (MoveKind::PedestalDown, Vector3::new(0.0, 3.0, 0.0)),
        ];
        for (kind, end) in cases {
            let t = generate(&CameraMoveSpec::new(kind, 3.0, 4), base()).unwrap();
            let c = t.frames()[3].pose.center().coords;
            assert!((c - end).norm() < 1e-12, "{kind:?}");
            let mid = t.frames()[1].pose.center().coords;
            assert!((mid - end / 3.0).norm() < 1e-12);
            assert!(t.frames()[3].pose.rotation == Matrix3::identity());
        }
    }

    #[test]
    fn zoom_is_log_linear() {
        let t = generate(&CameraMoveSpec::new(MoveKind::ZoomIn, 2.0, 3), base()).unwrap();
        let fx: Vec<f64> = t.frames().iter().map(|f| f.intrinsics.fx).collect();
        assert_eq!(fx[0], 768.0);
        assert!((fx[1] - 768.0 * 2f64.sqrt()).abs() < 1e-9);
        assert!((fx[2] - 1536.0).abs() < 1e-9);
        assert!(t.poses().all(|p| p.is_identity(0.0)));
        let t = generate(&CameraMoveSpec::new(MoveKind::ZoomOut, 2.0, 3), base()).unwrap();
        assert!((t.frames()[2].intrinsics.fx - 384.0).abs() < 1e-9);
        assert_eq!(t.frames()[2].intrinsics.cx, 384.0);
    }

    #[test]
    fn orbit_keeps_pivot_centered() {
        for kind in [MoveKind::OrbitLeft, MoveKind::OrbitRight] {
            let t = generate(&CameraMoveSpec::new(kind, 40.0, 9), base()).unwrap();
            let pivot = Point3::new(0.0, 0.0, DEFAULT_PIVOT_DISTANCE);
            for f in t.frames() {
                let p = project_point(&f.intrinsics, &f.pose, &pivot).unwrap();
                assert!((p.u - 384.0).abs() < 0.5 && (p.v - 256.0).abs() < 0.5);
            }
            let c = t.frames()[8].pose.center();
            if kind == MoveKind::OrbitLeft {
                assert!(c.x < 0.0);
            } else {
                assert!(c.x > 0.0);
            }
        }
    }

    #[test]
    fn single_frame_is_identity() {
        let t = generate(&CameraMoveSpec::new(MoveKind::DollyIn, 5.0, 1), base()).unwrap();
        assert_eq!(t.len(), 1);
        assert!(t.frames()[0].pose.is_identity(0.0));
    }

    #[test]
    fn invalid_specs() {
        assert!(generate(&CameraMoveSpec::new(MoveKind::PanLeft, 10.0, 0), base()).is_err());
        assert!(generate(&CameraMoveSpec::new(MoveKind::PanLeft, f64::NAN, 3), base()).is_err());
        assert!(generate(&CameraMoveSpec::new(MoveKind::ZoomIn, 0.0, 3), base()).is_err());
        assert!(generate(&CameraMoveSpec::new(MoveKind::ZoomOut, -2.0, 3), base()).is_err());
    }

    #[test]
    fn compose_examples() {
        let pan = generate(&CameraMoveSpec::new(MoveKind::PanLeft, 30.0, 4), base()).unwrap();
        let zoom = generate(&CameraMoveSpec::new(MoveKind::ZoomIn, 2.0, 4), base()).unwrap();
        let stat = generate(&CameraMoveSpec::new(MoveKind::Static, 0.0, 4), base()).unwrap();
        assert_eq!(compose(&stat, &pan).unwrap(), pan);
        let both = compose(&pan, &zoom).unwrap();
        for ((b, p), z) in both.frames().iter().zip(pan.frames()).zip(zoom.frames()) {
            assert!(b.pose.approx_eq(&p.pose, 1e-12));
            assert!((b.intrinsics.fx - z.intrinsics.fx).abs() < 1e-9);
        }
        let short = generate(&CameraMoveSpec::new(MoveKind::Static, 0.0, 3), base()).unwrap();
        assert!(compose(&pan, &short).is_err());
    }

    #[test]
    fn metric_examples() {
        let id = generate(&CameraMoveSpec::new(MoveKind::Static, 0.0, 2), base()).unwrap();
        assert_eq!(rot_err(&id, &id).unwrap(), 0.0);
        assert_eq!(trans_err(&id, &id).unwrap(), 0.0);

        let quarter = id.map_poses(|_| CameraPose::from_center(yaw(std::f64::consts::FRAC_PI_2), Point3::origin()));
        assert!((rot_err(&id, &quarter).unwrap() - 90.0).abs() < 1e-6);
        let half = id.map_poses(|_| CameraPose::from_center(yaw(std::f64::consts::PI), Point3::origin()));
        assert!((rot_err(&id, &half).unwrap() - 180.0).abs() < 1e-6);

        let moving = generate(&CameraMoveSpec::new(MoveKind::DollyIn, 1.0, 2), base()).unwrap();
        assert!((trans_err(&moving, &id).unwrap() - 0.5).abs() < 1e-12);
        assert!((trans_err(&id, &moving).unwrap() - 0.5).abs() < 1e-12);
        assert!(rot_err(&id, &pan3()).is_err());
    }

    fn pan3() -> CameraTrajectory {
        generate(&CameraMoveSpec::new(MoveKind::PanLeft, 30.0, 3), base()).unwrap()
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("pan-left".parse::<MoveKind>().unwrap(), MoveKind::PanLeft);
        assert_eq!("ZOOM_IN".parse::<MoveKind>().unwrap(), MoveKind::ZoomIn);
        assert!("spin".parse::<MoveKind>().is_err());
        for k in MoveKind::ALL {
            assert_eq!(k.name().parse::<MoveKind>().unwrap(), k);
        }
    }
}

//! JSON scene document, the human-readable interchange format for a
//! [`MotionScene`].
//!
//! Floats are written in shortest round-trip form, so parsing a serialized
//! scene gives back the same values bit for bit.

use std::path::Path;

use nalgebra::{Matrix3, Point3, Vector3};
use serde::{Deserialize, Serialize};

use super::read_file;
use crate::error::{Error, Result};
use crate::scene::{
    CameraFrame, CameraIntrinsics, CameraPose, CameraTrajectory, MotionScene, RenderParams, Rgb,
    Sphere, SphereSet, WorldEnvelope,
};

pub const SCENE_VERSION: &str = "motionscene/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDocument {
    pub version: String,
    pub width: u32,
    pub height: u32,
    pub render_params: RenderParamsDoc,
    pub envelope: EnvelopeDoc,
    pub trajectory: Vec<FrameDoc>,
    pub spheres: Vec<SphereDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderParamsDoc {
    pub r_min: f64,
    pub r_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeDoc {
    pub side_length: f64,
    pub checker_cell: f64,
    pub color_a: Rgb,
    pub color_b: Rgb,
    /// `+x, -x, +y, -y, +z, -z`
    pub face_tints: [Option<[f64; 3]>; 6],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntrinsicsDoc {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

/// One frame; `rotation` rows and `translation` map world to camera.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameDoc {
    pub intrinsics: IntrinsicsDoc,
    pub rotation: [[f64; 3]; 3],
    pub translation: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereDoc {
    pub id: u32,
    pub color: Rgb,
    pub track: Vec<[f64; 3]>,
    pub normalized_depths: Vec<f64>,
}

impl From<&CameraFrame> for FrameDoc {
    fn from(f: &CameraFrame) -> Self {
        let r = &f.pose.rotation;
        let t = &f.pose.translation;
        FrameDoc {
            intrinsics: IntrinsicsDoc {
                fx: f.intrinsics.fx,
                fy: f.intrinsics.fy,
                cx: f.intrinsics.cx,
                cy: f.intrinsics.cy,
            },
            rotation: [
                [r[(0, 0)], r[(0, 1)], r[(0, 2)]],
                [r[(1, 0)], r[(1, 1)], r[(1, 2)]],
                [r[(2, 0)], r[(2, 1)], r[(2, 2)]],
            ],
            translation: [t.x, t.y, t.z],
        }
    }
}

impl From<&MotionScene> for SceneDocument {
    fn from(scene: &MotionScene) -> Self {
        SceneDocument {
            version: SCENE_VERSION.to_string(),
            width: scene.width,
            height: scene.height,
            render_params: RenderParamsDoc {
                r_min: scene.render_params.r_min,
                r_max: scene.render_params.r_max,
            },
            envelope: EnvelopeDoc {
                side_length: scene.envelope.side_length,
                checker_cell: scene.envelope.checker_cell,
                color_a: scene.envelope.color_a,
                color_b: scene.envelope.color_b,
                face_tints: scene.envelope.face_tints,
            },
            trajectory: scene.trajectory.frames().iter().map(FrameDoc::from).collect(),
            spheres: scene
                .spheres
                .iter()
                .map(|s| SphereDoc {
                    id: s.id,
                    color: s.color,
                    track: s.track.iter().map(|p| [p.x, p.y, p.z]).collect(),
                    normalized_depths: s.normalized_depths.clone(),
                })
                .collect(),
        }
    }
}

impl SceneDocument {
    /// Converts to a scene and checks every invariant.
    pub fn into_scene(self) -> Result<MotionScene> {
        if self.version != SCENE_VERSION {
            return Err(Error::VersionUnsupported(self.version));
        }
        let mut frames = Vec::with_capacity(self.trajectory.len());
        for (i, f) in self.trajectory.iter().enumerate() {
            let r = &f.rotation;
            let pose = CameraPose {
                rotation: Matrix3::new(
                    r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1],
                    r[2][2],
                ),
                translation: Vector3::from(f.translation),
            };
            if let Err(e) = pose.check_rotation() {
                return Err(Error::semantic(format!("trajectory[{i}].rotation"), e.to_string()));
            }
            frames.push(CameraFrame {
                intrinsics: CameraIntrinsics::new(
                    f.intrinsics.fx,
                    f.intrinsics.fy,
                    f.intrinsics.cx,
                    f.intrinsics.cy,
                ),
                pose,
            });
        }
        let trajectory = CameraTrajectory::new(frames)
            .map_err(|e| Error::semantic("trajectory", e.to_string()))?;
        let scene = MotionScene {
            width: self.width,
            height: self.height,
            trajectory,
            spheres: SphereSet {
                spheres: self
                    .spheres
                    .into_iter()
                    .map(|s| Sphere {
                        id: s.id,
                        color: s.color,
                        track: s.track.into_iter().map(Point3::from).collect(),
                        normalized_depths: s.normalized_depths,
                    })
                    .collect(),
            },
            envelope: WorldEnvelope {
                side_length: self.envelope.side_length,
                checker_cell: self.envelope.checker_cell,
                color_a: self.envelope.color_a,
                color_b: self.envelope.color_b,
                face_tints: self.envelope.face_tints,
            },
            render_params: RenderParams {
                r_min: self.render_params.r_min,
                r_max: self.render_params.r_max,
            },
        };
        scene.validate()?;
        Ok(scene)
    }
}

pub fn serialize_scene(scene: &MotionScene) -> String {
    let mut s = serde_json::to_string_pretty(&SceneDocument::from(scene))
        .expect("scene documents always serialize");
    s.push('\n');
    s
}

pub fn parse_scene(text: &str) -> Result<MotionScene> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    match value.get("version").and_then(|v| v.as_str()) {
        Some(SCENE_VERSION) => {}
        Some(other) => return Err(Error::VersionUnsupported(other.to_string())),
        None => return Err(Error::VersionUnsupported(String::new())),
    }
    let doc: SceneDocument =
        serde_json::from_value(value).map_err(|e| Error::semantic("document", e.to_string()))?;
    doc.into_scene()
}

pub fn read_scene(path: &Path) -> Result<MotionScene> {
    let bytes = read_file(path)?;
    let text = String::from_utf8_lossy(&bytes);
    parse_scene(&text).map_err(|e| e.in_file(path))
}

pub fn write_scene(path: &Path, scene: &MotionScene) -> Result<()> {
    std::fs::write(path, serialize_scene(scene))?;
    Ok(())
}

//! Request and response bodies. Shared with the client crate.

use motionscene::camera_paths::CameraMoveSpec;
pub use motionscene::io::scene_doc::{FrameDoc, IntrinsicsDoc, SphereDoc};
use serde::{Deserialize, Serialize};

/// Env var holding the listen port.
pub const PORT_ENV: &str = "MOTION_SERVICE_PORT";
pub const DEFAULT_PORT: u16 = 8080;

pub const VERSION_HEADER: &str = "x-scene-version";
pub const CACHE_HEADER: &str = "x-cache";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthUpload {
    pub width: u32,
    pub height: u32,
    /// Row-major camera-frame depths.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreateSession {
    /// Base64 PNG.
    pub reference_png: String,
    #[serde(default)]
    pub depth: Option<DepthUpload>,
    pub frames: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionInfo {
    pub id: u64,
    pub width: u32,
    pub height: u32,
    pub frames: usize,
    pub version: u64,
    pub spheres: usize,
    pub has_depth: bool,
}

/// World-to-camera pose rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseDoc {
    pub rotation: [[f64; 3]; 3],
    pub translation: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CameraUpdate {
    Preset {
        spec: CameraMoveSpec,
    },
    /// `second` applied on top of `first`.
    Compose {
        first: CameraMoveSpec,
        second: CameraMoveSpec,
    },
    /// Poses in any world frame; they are re-based on the first one.
    Poses {
        poses: Vec<PoseDoc>,
        #[serde(default)]
        intrinsics: Option<Vec<IntrinsicsDoc>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraState {
    pub version: u64,
    pub frames: Vec<FrameDoc>,
}

/// A path drawn on the reference image, lifted server-side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawnTrajectory {
    pub points: Vec<[f64; 2]>,
    #[serde(default)]
    pub depth_hint: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereChange {
    pub version: u64,
    pub sphere: Option<SphereDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereList {
    pub version: u64,
    pub spheres: Vec<SphereDoc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenderRequest {
    pub first: usize,
    pub last: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobStatus {
    Pending,
    Running,
    Done,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderJob {
    pub id: u64,
    pub version: u64,
    pub status: JobStatus,
    pub first: usize,
    /// `rendered[i]` is frame `first + i`.
    pub rendered: Vec<bool>,
    #[serde(default)]
    pub error: Option<ErrorDetail>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerKind {
    Spheres,
    Envelope,
    Composite,
}

impl LayerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LayerKind::Spheres => "spheres",
            LayerKind::Envelope => "envelope",
            LayerKind::Composite => "composite",
        }
    }
}

impl std::str::FromStr for LayerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "spheres" => Ok(LayerKind::Spheres),
            "envelope" => Ok(LayerKind::Envelope),
            "composite" => Ok(LayerKind::Composite),
            other => Err(format!("unknown layer {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorDetail {
    pub kind: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: ErrorDetail,
}

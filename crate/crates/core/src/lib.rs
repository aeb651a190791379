//! Sphere-and-envelope motion representation.
//!
//! A clip's motion is described by a set of colored unit spheres marking key
//! object parts and a checkerboard cube enclosing the scene. Rendering the
//! spheres and the cube separately yields two aligned per-frame images: the
//! sphere layer carries object motion, the envelope layer carries camera
//! motion.
//!
//! * [`scene`]: representation types and construction from tracks and poses
//! * [`render`]: projection, the two layer rasterizers and a brute-force oracle
//! * [`camera_paths`]: preset camera moves, composition and camera metrics
//! * [`curation`]: motion scoring, percentile filtering and sphere selection
//! * [`manipulation`]: trajectory lifting, clone, transfer and local edits
//! * [`io`]: scene documents and the ingest file formats

pub mod camera_paths;
pub mod curation;
pub mod error;
pub mod grid;
pub mod io;
pub mod manipulation;
pub mod render;
pub mod scene;

pub use error::{Error, ParseError, Result};
pub use grid::{DepthMap, Grid, Mask};
pub use scene::{
    align_to_first_frame, build_scene, default_intrinsics, normalize_depths, CameraFrame,
    CameraIntrinsics, CameraPose, CameraTrajectory, MotionScene, RenderParams, Rgb, Sphere,
    SphereSet, WorldEnvelope,
};

pub use image::RgbImage;

//! Projection and the two control-signal layers.

pub mod envelope;
pub mod oracle;
pub mod projection;
pub mod spheres;

use image::RgbImage;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scene::MotionScene;

pub use envelope::render_envelope_layer;
pub use oracle::{oracle_render, Layer};
pub use projection::{project_point, unproject_pixel, Projection, BEHIND_CAMERA_EPS};
pub use spheres::{project_sphere_set, render_sphere_layer, ProjectedCircle};

/// Sphere layer and envelope layer for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSignalFrame {
    pub frame_index: usize,
    pub sphere_layer: RgbImage,
    pub envelope_layer: RgbImage,
}

pub fn render_frame(scene: &MotionScene, frame_index: usize) -> Result<ControlSignalFrame> {
    Ok(ControlSignalFrame {
        frame_index,
        sphere_layer: render_sphere_layer(scene, frame_index)?,
        envelope_layer: render_envelope_layer(scene, frame_index)?,
    })
}

/// Renders both layers for every frame. Output does not depend on thread scheduling.
pub fn render_scene(scene: &MotionScene) -> Result<Vec<ControlSignalFrame>> {
    render_range(scene, 1, scene.frame_count())
}

/// Renders the inclusive 1-based range `first..=last`.
pub fn render_range(
    scene: &MotionScene,
    first: usize,
    last: usize,
) -> Result<Vec<ControlSignalFrame>> {
    if first == 0 || first > last || last > scene.frame_count() {
        return Err(Error::invalid(format!(
            "frame range {first}..={last} outside [1, {}]",
            scene.frame_count()
        )));
    }
    // report the earliest escaping frame regardless of scheduling
    for l in first..=last {
        let center = scene.trajectory.frame(l)?.pose.center();
        if !scene.envelope.contains(&center) {
            return Err(Error::CameraEscapedEnvelope { frame: l });
        }
    }
    (first..=last)
        .into_par_iter()
        .map(|l| render_frame(scene, l))
        .collect()
}

/// Blends the envelope layer, then the non-black sphere pixels, over a
/// reference image at `opacity`. For inspection only.
pub fn composite(
    reference: &RgbImage,
    frame: &ControlSignalFrame,
    opacity: f64,
) -> Result<RgbImage> {
    if reference.dimensions() != frame.sphere_layer.dimensions() {
        return Err(Error::invalid(format!(
            "reference image is {:?}, control layers are {:?}",
            reference.dimensions(),
            frame.sphere_layer.dimensions()
        )));
    }
    if !(0.0..=1.0).contains(&opacity) {
        return Err(Error::invalid(format!("opacity {opacity} outside [0, 1]")));
    }
    let blend = |a: u8, b: u8| (a as f64 * (1.0 - opacity) + b as f64 * opacity).round() as u8;
    let mut out = reference.clone();
    for ((o, e), s) in out
        .pixels_mut()
        .zip(frame.envelope_layer.pixels())
        .zip(frame.sphere_layer.pixels())
    {
        for k in 0..3 {
            o.0[k] = blend(o.0[k], e.0[k]);
        }
        if s.0 != [0, 0, 0] {
            for k in 0..3 {
                o.0[k] = blend(o.0[k], s.0[k]);
            }
        }
    }
    Ok(out)
}

//! Brute-force reference renderers.
//!
//! These share only the per-pixel floating-point formulas with the fast
//! renderers (ray direction, face hit, coverage test), so results are
//! comparable byte for byte, while the search is exhaustive: every sphere is
//! tested at every pixel, and every ray is intersected with all six face
//! planes and bounds-checked.

use image::RgbImage;

use super::projection::project_point;
use crate::error::{Error, Result};
use crate::scene::MotionScene;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layer {
    Spheres,
    Envelope,
}

pub fn oracle_render(scene: &MotionScene, frame_index: usize, layer: Layer) -> Result<RgbImage> {
    match layer {
        Layer::Spheres => oracle_spheres(scene, frame_index),
        Layer::Envelope => oracle_envelope(scene, frame_index),
    }
}

fn oracle_spheres(scene: &MotionScene, frame_index: usize) -> Result<RgbImage> {
    let frame = scene.trajectory.frame(frame_index)?;
    let l = frame_index - 1;
    let params = scene.render_params;
    // (u, v, radius, depth, color) for spheres in front of the camera
    let discs: Vec<_> = scene
        .spheres
        .iter()
        .filter_map(|s| {
            let p = project_point(&frame.intrinsics, &frame.pose, &s.track[l])?;
            let d = s.normalized_depths[l];
            let r = params.r_min + (params.r_max - params.r_min) * (1.0 - d);
            Some((p.u, p.v, r, d, s.color))
        })
        .collect();
    let mut img = RgbImage::new(scene.width, scene.height);
    for j in 0..scene.height {
        for i in 0..scene.width {
            let mut winner: Option<(f64, [u8; 3])> = None;
            for &(u, v, r, d, color) in &discs {
                let dx = i as f64 + 0.5 - u;
                let dy = j as f64 + 0.5 - v;
                if dx * dx + dy * dy <= r * r && winner.is_none_or(|(wd, _)| d < wd) {
                    winner = Some((d, color));
                }
            }
            if let Some((_, color)) = winner {
                img.put_pixel(i, j, image::Rgb(color));
            }
        }
    }
    Ok(img)
}

fn oracle_envelope(scene: &MotionScene, frame_index: usize) -> Result<RgbImage> {
    let frame = scene.trajectory.frame(frame_index)?;
    let env = &scene.envelope;
    let half = env.side_length / 2.0;
    let center = frame.pose.center();
    let c = [center.x, center.y, center.z];
    if c.iter().any(|v| v.abs() >= half) {
        return Err(Error::CameraEscapedEnvelope { frame: frame_index });
    }
    let k = &frame.intrinsics;
    let r = &frame.pose.rotation;
    let mut img = RgbImage::new(scene.width, scene.height);
    for j in 0..scene.height {
        for i in 0..scene.width {
            let x = (i as f64 + 0.5 - k.cx) / k.fx;
            let y = (j as f64 + 0.5 - k.cy) / k.fy;
            let mut d = [0.0f64; 3];
            for (col, dk) in d.iter_mut().enumerate() {
                *dk = r[(0, col)] * x + r[(1, col)] * y + r[(2, col)];
            }
            let mut hit: Option<(f64, usize, f64, f64)> = None;
            for face in 0..6 {
                let axis = face / 2;
                let plane = if face % 2 == 0 { half } else { -half };
                if d[axis] == 0.0 {
                    continue;
                }
                let t = (plane - c[axis]) / d[axis];
                if !(t > 0.0) {
                    continue;
                }
                let others: Vec<usize> = (0..3).filter(|&a| a != axis).collect();
                let pa = c[others[0]] + t * d[others[0]];
                let pb = c[others[1]] + t * d[others[1]];
                let slack = half * 1e-9;
                if pa.abs() > half + slack || pb.abs() > half + slack {
                    continue;
                }
                if hit.is_none_or(|(bt, ..)| t < bt) {
                    hit = Some((t, face, pa, pb));
                }
            }
            let (_, face, pa, pb) = hit.expect("camera inside the cube always hits a face");
            let ca = (pa / env.checker_cell).floor() as i64;
            let cb = (pb / env.checker_cell).floor() as i64;
            let base = if (ca + cb) % 2 == 0 {
                env.color_a
            } else {
                env.color_b
            };
            let mut color = base;
            if let Some(m) = env.face_tints[face] {
                for ch in 0..3 {
                    color[ch] = (base[ch] as f64 * m[ch]).round().clamp(0.0, 255.0) as u8;
                }
            }
            img.put_pixel(i, j, image::Rgb(color));
        }
    }
    Ok(img)
}

use image::RgbImage;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scene::{MotionScene, Rgb, WorldEnvelope};

/// In-plane axes for a face on `axis`.
pub(crate) const PLANE_AXES: [(usize, usize); 3] = [(1, 2), (0, 2), (0, 1)];

pub(crate) fn tint(color: Rgb, tint: Option<[f64; 3]>) -> Rgb {
    match tint {
        None => color,
        Some(m) => {
            let mut out = [0u8; 3];
            for k in 0..3 {
                out[k] = (color[k] as f64 * m[k]).round().clamp(0.0, 255.0) as u8;
            }
            out
        }
    }
}

/// `[face][parity]` colors, faces in `+x, -x, +y, -y, +z, -z` order.
fn palette(env: &WorldEnvelope) -> [[Rgb; 2]; 6] {
    let mut p = [[[0u8; 3]; 2]; 6];
    for (f, t) in env.face_tints.iter().enumerate() {
        p[f] = [tint(env.color_a, *t), tint(env.color_b, *t)];
    }
    p
}

/// Checker parity of a face hit; 0 selects `color_a`.
#[inline]
pub(crate) fn checker_parity(a: f64, b: f64, cell: f64) -> usize {
    ((a / cell).floor() as i64 + (b / cell).floor() as i64).rem_euclid(2) as usize
}

/// Envelope layer: every pixel shows the checkered cube face its ray exits through.
pub fn render_envelope_layer(scene: &MotionScene, frame_index: usize) -> Result<RgbImage> {
    let frame = scene.trajectory.frame(frame_index)?;
    let env = &scene.envelope;
    let center = frame.pose.center();
    if !env.contains(&center) {
        return Err(Error::CameraEscapedEnvelope { frame: frame_index });
    }
    let (w, h) = (scene.width as usize, scene.height as usize);
    let k = &frame.intrinsics;
    let r = &frame.pose.rotation;
    let xs: Vec<f64> = (0..w).map(|i| (i as f64 + 0.5 - k.cx) / k.fx).collect();
    let ys: Vec<f64> = (0..h).map(|j| (j as f64 + 0.5 - k.cy) / k.fy).collect();
    let c = [center.x, center.y, center.z];
    let half = env.half_side();
    let cell = env.checker_cell;
    let colors = palette(env);

    let mut buf = vec![0u8; w * h * 3];
    buf.par_chunks_mut(w * 3).enumerate().for_each(|(j, row)| {
        let y = ys[j];
        for (i, px) in row.chunks_exact_mut(3).enumerate() {
            let x = xs[i];
            let d = [
                r[(0, 0)] * x + r[(1, 0)] * y + r[(2, 0)],
                r[(0, 1)] * x + r[(1, 1)] * y + r[(2, 1)],
                r[(0, 2)] * x + r[(1, 2)] * y + r[(2, 2)],
            ];
            let mut best = f64::INFINITY;
            let mut face = 0usize;
            for a in 0..3 {
                let t = if d[a] > 0.0 {
                    (half - c[a]) / d[a]
                } else if d[a] < 0.0 {
                    (-half - c[a]) / d[a]
                } else {
                    continue;
                };
                if t < best {
                    best = t;
                    face = 2 * a + usize::from(d[a] < 0.0);
                }
            }
            let (p, q) = PLANE_AXES[face / 2];
            let hp = c[p] + best * d[p];
            let hq = c[q] + best * d[q];
            px.copy_from_slice(&colors[face][checker_parity(hp, hq, cell)]);
        }
    });
    Ok(RgbImage::from_raw(scene.width, scene.height, buf).expect("buffer sized to image"))
}

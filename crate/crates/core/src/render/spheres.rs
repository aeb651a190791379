use std::cmp::Ordering;

use image::RgbImage;

use super::projection::project_point;
use crate::error::Result;
use crate::scene::{MotionScene, Rgb};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedCircle {
    pub id: u32,
    pub u: f64,
    pub v: f64,
    pub radius: f64,
    pub depth: f64,
    pub color: Rgb,
    pub visible: bool,
}

/// One circle per sphere for a 1-based frame. Behind-camera spheres are kept
/// but marked invisible, with their center left at the origin.
pub fn project_sphere_set(scene: &MotionScene, frame_index: usize) -> Result<Vec<ProjectedCircle>> {
    let frame = scene.trajectory.frame(frame_index)?;
    let l = frame_index - 1;
    Ok(scene
        .spheres
        .iter()
        .map(|s| {
            let depth = s.normalized_depths[l];
            let radius = scene.render_params.radius(depth);
            let (u, v, visible) = match project_point(&frame.intrinsics, &frame.pose, &s.track[l]) {
                Some(p) => (p.u, p.v, true),
                None => (0.0, 0.0, false),
            };
            ProjectedCircle {
                id: s.id,
                u,
                v,
                radius,
                depth,
                color: s.color,
                visible,
            }
        })
        .collect())
}

/// Painter's order: farthest first. Equal depths draw the later list entry
/// first, so the earliest sphere ends on top.
pub(crate) fn draw_order(circles: &[ProjectedCircle]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..circles.len()).filter(|&i| circles[i].visible).collect();
    order.sort_by(|&a, &b| match circles[b].depth.total_cmp(&circles[a].depth) {
        Ordering::Equal => b.cmp(&a),
        o => o,
    });
    order
}

fn pixel_span(center: f64, radius: f64, limit: u32) -> Option<(u32, u32)> {
    // one pixel of slack on each side; the exact test below decides coverage
    let lo = (center - radius - 0.5).floor() - 1.0;
    let hi = (center + radius - 0.5).ceil() + 1.0;
    if !(lo.is_finite() && hi.is_finite()) || hi < 0.0 || lo > (limit as f64 - 1.0) {
        return None;
    }
    let lo = lo.max(0.0) as u32;
    let hi = hi.min(limit as f64 - 1.0) as u32;
    Some((lo, hi))
}

pub(crate) fn fill_circles(width: u32, height: u32, circles: &[ProjectedCircle]) -> RgbImage {
    let mut buf = vec![0u8; width as usize * height as usize * 3];
    for idx in draw_order(circles) {
        let c = &circles[idx];
        let r2 = c.radius * c.radius;
        let (Some((x0, x1)), Some((y0, y1))) =
            (pixel_span(c.u, c.radius, width), pixel_span(c.v, c.radius, height))
        else {
            continue;
        };
        for j in y0..=y1 {
            let dy = j as f64 + 0.5 - c.v;
            let row = j as usize * width as usize;
            for i in x0..=x1 {
                let dx = i as f64 + 0.5 - c.u;
                if dx * dx + dy * dy <= r2 {
                    let o = (row + i as usize) * 3;
                    buf[o..o + 3].copy_from_slice(&c.color);
                }
            }
        }
    }
    RgbImage::from_raw(width, height, buf).expect("buffer sized to image")
}

/// Sphere layer: black background, hard-edged disks drawn far to near.
pub fn render_sphere_layer(scene: &MotionScene, frame_index: usize) -> Result<RgbImage> {
    let circles = project_sphere_set(scene, frame_index)?;
    Ok(fill_circles(scene.width, scene.height, &circles))
}

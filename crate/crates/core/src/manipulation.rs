//! Representation-side edits behind the application workflows: lifting
//! user-drawn trajectories, cloning, transferring local motion onto a new
//! image, and masked local edits.

use nalgebra::{Point2, Point3};

use crate::error::{Error, Result};
use crate::grid::{DepthMap, Mask};
use crate::render::{project_point, unproject_pixel};
use crate::scene::{
    build_scene, default_intrinsics, CameraPose, CameraTrajectory, MotionScene, RenderParams,
    Sphere,
};

/// Max distance from an anchor pixel to a sphere's frame-1 center for it to be picked.
pub const MATCH_RADIUS_PX: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryPoints {
    /// Pixel positions in the frame-1 view.
    Pixels(Vec<Point2<f64>>),
    /// World positions.
    World(Vec<Point3<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserTrajectory {
    pub points: TrajectoryPoints,
    /// Camera-frame depth for lifting pixel paths; overrides the depth map.
    pub depth_hint: Option<f64>,
}

impl UserTrajectory {
    pub fn pixels(points: Vec<Point2<f64>>, depth_hint: Option<f64>) -> Self {
        UserTrajectory {
            points: TrajectoryPoints::Pixels(points),
            depth_hint,
        }
    }

    pub fn world(points: Vec<Point3<f64>>) -> Self {
        UserTrajectory {
            points: TrajectoryPoints::World(points),
            depth_hint: None,
        }
    }
}

/// Piecewise-linear arc-length resampling to exactly `count` points. Inputs
/// that already have `count` points are returned unchanged.
pub fn resample_polyline<const D: usize>(points: &[[f64; D]], count: usize) -> Vec<[f64; D]> {
    if points.is_empty() || count == 0 {
        return Vec::new();
    }
    if points.len() == count {
        return points.to_vec();
    }
    let dist = |a: &[f64; D], b: &[f64; D]| {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    };
    let mut cumulative = vec![0.0];
    for w in points.windows(2) {
        cumulative.push(cumulative.last().unwrap() + dist(&w[0], &w[1]));
    }
    let total = *cumulative.last().unwrap();
    if count == 1 || total == 0.0 {
        return vec![points[0]; count];
    }
    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    for k in 0..count {
        if k == count - 1 {
            out.push(*points.last().unwrap());
            break;
        }
        let target = total * k as f64 / (count - 1) as f64;
        while seg + 1 < points.len() - 1 && cumulative[seg + 1] < target {
            seg += 1;
        }
        let len = cumulative[seg + 1] - cumulative[seg];
        let t = if len > 0.0 {
            ((target - cumulative[seg]) / len).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let (a, b) = (points[seg], points[seg + 1]);
        let mut p = [0.0; D];
        for i in 0..D {
            p[i] = a[i] + (b[i] - a[i]) * t;
        }
        out.push(p);
    }
    out
}

/// Turns a user trajectory into an `L`-frame world track. Pixel paths are
/// lifted at the constant depth of their start pixel, seen from the frame-1
/// camera.
pub fn lift_trajectory(
    traj: &UserTrajectory,
    depth_map: Option<&DepthMap>,
    scene: &MotionScene,
) -> Result<Vec<Point3<f64>>> {
    let l = scene.frame_count();
    match &traj.points {
        TrajectoryPoints::World(points) => {
            if points.is_empty() {
                return Err(Error::invalid("trajectory has no points"));
            }
            let raw: Vec<[f64; 3]> = points.iter().map(|p| [p.x, p.y, p.z]).collect();
            Ok(resample_polyline(&raw, l).into_iter().map(Point3::from).collect())
        }
        TrajectoryPoints::Pixels(points) => {
            let start = points
                .first()
                .ok_or_else(|| Error::invalid("trajectory has no points"))?;
            let (w, h) = (scene.width as f64, scene.height as f64);
            if !(start.x >= 0.0 && start.y >= 0.0 && start.x < w && start.y < h) {
                return Err(Error::invalid(format!(
                    "start pixel ({}, {}) outside the {}x{} image",
                    start.x, start.y, scene.width, scene.height
                )));
            }
            let depth = match (traj.depth_hint, depth_map) {
                (Some(d), _) => d,
                (None, Some(map)) => {
                    if map.dims() != (scene.width, scene.height) {
                        return Err(Error::invalid(format!(
                            "depth map is {:?}, scene is {}x{}",
                            map.dims(),
                            scene.width,
                            scene.height
                        )));
                    }
                    *map.at_position(start.x, start.y).expect("start checked in bounds")
                }
                (None, None) => return Err(Error::MissingDepth),
            };
            if !(depth.is_finite() && depth > 0.0) {
                return Err(Error::invalid(format!("lifting depth {depth} is not positive")));
            }
            let frame = &scene.trajectory.frames()[0];
            let raw: Vec<[f64; 2]> = points.iter().map(|p| [p.x, p.y]).collect();
            resample_polyline(&raw, l)
                .into_iter()
                .map(|[u, v]| unproject_pixel(&frame.intrinsics, &frame.pose, u, v, depth))
                .collect()
        }
    }
}

fn checked_track_len(scene: &MotionScene, track: &[Point3<f64>]) -> Result<()> {
    if track.len() != scene.frame_count() {
        return Err(Error::invalid(format!(
            "track has {} positions, scene has {} frames",
            track.len(),
            scene.frame_count()
        )));
    }
    Ok(())
}

/// Adds a sphere with the next free id and renormalizes depths over the whole scene.
pub fn add_sphere(scene: &MotionScene, track: Vec<Point3<f64>>) -> Result<(MotionScene, u32)> {
    checked_track_len(scene, &track)?;
    let mut out = scene.clone();
    let id = out.spheres.next_id();
    let color = out.color_for_start(&track[0]);
    out.spheres.spheres.push(Sphere {
        id,
        normalized_depths: vec![0.5; track.len()],
        track,
        color,
    });
    out.spheres.renormalize()?;
    out.validate()?;
    Ok((out, id))
}

/// Replaces one sphere's track, recoloring it from its new start.
pub fn replace_sphere_track(
    scene: &MotionScene,
    id: u32,
    track: Vec<Point3<f64>>,
) -> Result<MotionScene> {
    checked_track_len(scene, &track)?;
    let mut out = scene.clone();
    let color = out.color_for_start(&track[0]);
    let sphere = out
        .spheres
        .spheres
        .iter_mut()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::invalid(format!("no sphere with id {id}")))?;
    sphere.track = track;
    sphere.color = color;
    out.spheres.renormalize()?;
    out.validate()?;
    Ok(out)
}

pub fn remove_sphere(scene: &MotionScene, id: u32) -> Result<MotionScene> {
    let mut out = scene.clone();
    let before = out.spheres.len();
    out.spheres.spheres.retain(|s| s.id != id);
    if out.spheres.len() == before {
        return Err(Error::invalid(format!("no sphere with id {id}")));
    }
    out.spheres.renormalize()?;
    Ok(out)
}

/// The representation of a cloned motion is the source's, unchanged.
pub fn clone_motion(source: &MotionScene) -> MotionScene {
    source.clone()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrespondencePair {
    pub source: Point2<f64>,
    pub target: Point2<f64>,
}

/// Uniform scale plus translation, `q = scale * p + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    pub scale: f64,
    pub translation: nalgebra::Vector2<f64>,
}

impl Similarity {
    pub fn apply(&self, p: Point2<f64>) -> Point2<f64> {
        Point2::from(p.coords * self.scale + self.translation)
    }
}

/// Least-squares similarity without rotation. A single pair, or pairs whose
/// source points coincide, fixes the scale at 1.
pub fn fit_similarity(pairs: &[CorrespondencePair]) -> Result<Similarity> {
    if pairs.is_empty() {
        return Err(Error::invalid("at least one correspondence pair is required"));
    }
    let n = pairs.len() as f64;
    let ps = pairs.iter().fold(nalgebra::Vector2::zeros(), |a, p| a + p.source.coords) / n;
    let qs = pairs.iter().fold(nalgebra::Vector2::zeros(), |a, p| a + p.target.coords) / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for p in pairs {
        let dp = p.source.coords - ps;
        let dq = p.target.coords - qs;
        num += dp.dot(&dq);
        den += dp.norm_squared();
    }
    let scale = if pairs.len() == 1 || den == 0.0 {
        1.0
    } else {
        num / den
    };
    Ok(Similarity {
        scale,
        translation: qs - ps * scale,
    })
}

/// Index of the sphere whose frame-1 center is nearest to `anchor`, among `candidates`.
fn nearest_sphere(
    scene: &MotionScene,
    anchor: Point2<f64>,
    candidates: impl Iterator<Item = usize>,
) -> Option<usize> {
    let frame = &scene.trajectory.frames()[0];
    candidates
        .filter_map(|i| {
            let s = &scene.spheres.spheres[i];
            let p = project_point(&frame.intrinsics, &frame.pose, &s.track[0])?;
            let d = (Point2::new(p.u, p.v) - anchor).norm();
            (d <= MATCH_RADIUS_PX).then_some((i, d))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
}

fn in_image(p: Point2<f64>, width: u32, height: u32) -> bool {
    p.x >= 0.0 && p.y >= 0.0 && p.x < width as f64 && p.y < height as f64
}

/// Moves the spheres picked by the source anchors onto a target image:
/// projected paths are mapped by the fitted similarity and lifted at the
/// target depth, keeping each sphere's relative depth profile. The result
/// has a static camera and only the transferred spheres.
pub fn transfer_motion(
    source: &MotionScene,
    pairs: &[CorrespondencePair],
    target_depth: &DepthMap,
    target_dims: (u32, u32),
) -> Result<MotionScene> {
    let similarity = fit_similarity(pairs)?;
    let (tw, th) = target_dims;
    if target_depth.dims() != target_dims {
        return Err(Error::invalid(format!(
            "target depth map is {:?}, target image is {tw}x{th}",
            target_depth.dims()
        )));
    }
    for (i, p) in pairs.iter().enumerate() {
        if !in_image(p.source, source.width, source.height) || !in_image(p.target, tw, th) {
            return Err(Error::invalid(format!("pair {i} lies outside its image")));
        }
    }
    let mut selected = Vec::new();
    for p in pairs {
        let idx = nearest_sphere(source, p.source, 0..source.spheres.len()).ok_or_else(|| {
            Error::OutOfFrame(format!(
                "no source sphere within {MATCH_RADIUS_PX} px of ({}, {})",
                p.source.x, p.source.y
            ))
        })?;
        if !selected.contains(&idx) {
            selected.push(idx);
        }
    }

    let k = default_intrinsics(tw, th)?;
    let identity = CameraPose::identity();
    let mut tracks = Vec::with_capacity(selected.len());
    for idx in selected {
        let sphere = &source.spheres.spheres[idx];
        let projected: Vec<_> = source
            .trajectory
            .frames()
            .iter()
            .zip(&sphere.track)
            .enumerate()
            .map(|(l, (f, x))| {
                project_point(&f.intrinsics, &f.pose, x).ok_or_else(|| {
                    Error::OutOfFrame(format!("sphere {} is behind the camera at frame {}", sphere.id, l + 1))
                })
            })
            .collect::<Result<_>>()?;
        let start = similarity.apply(Point2::new(projected[0].u, projected[0].v));
        if !in_image(start, tw, th) {
            return Err(Error::OutOfFrame(format!(
                "sphere {} maps to ({}, {}) outside the {tw}x{th} target",
                sphere.id, start.x, start.y
            )));
        }
        let z_target = *target_depth
            .at_position(start.x, start.y)
            .expect("start checked in bounds");
        if !(z_target.is_finite() && z_target > 0.0) {
            return Err(Error::invalid(format!(
                "target depth {z_target} at ({}, {}) is not positive",
                start.x, start.y
            )));
        }
        let z1 = projected[0].z;
        let track = projected
            .iter()
            .map(|p| {
                let q = similarity.apply(Point2::new(p.u, p.v));
                unproject_pixel(&k, &identity, q.x, q.y, z_target * (p.z / z1))
            })
            .collect::<Result<Vec<_>>>()?;
        tracks.push(track);
    }
    build_scene(
        tw,
        th,
        CameraTrajectory::fixed(k, source.frame_count())?,
        &tracks,
        source.envelope.clone(),
        RenderParams::default_for(tw, th),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditMode {
    FreezeSpheres,
    ReplaceSpheres,
    FreezeCamera,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EditDirective {
    pub mask: Mask,
    pub mode: EditMode,
    /// World tracks, one per replaced sphere; only for [`EditMode::ReplaceSpheres`].
    pub replacement: Option<Vec<Vec<Point3<f64>>>>,
}

impl EditDirective {
    pub fn freeze_spheres(mask: Mask) -> Self {
        EditDirective {
            mask,
            mode: EditMode::FreezeSpheres,
            replacement: None,
        }
    }

    pub fn freeze_camera(mask: Mask) -> Self {
        EditDirective {
            mask,
            mode: EditMode::FreezeCamera,
            replacement: None,
        }
    }

    pub fn replace_spheres(mask: Mask, tracks: Vec<Vec<Point3<f64>>>) -> Self {
        EditDirective {
            mask,
            mode: EditMode::ReplaceSpheres,
            replacement: Some(tracks),
        }
    }
}

fn apply_directive(scene: &mut MotionScene, d: &EditDirective) -> Result<()> {
    if d.mask.dims() != (scene.width, scene.height) {
        return Err(Error::invalid(format!(
            "edit mask is {:?}, scene is {}x{}",
            d.mask.dims(),
            scene.width,
            scene.height
        )));
    }
    if d.replacement.is_some() != (d.mode == EditMode::ReplaceSpheres) {
        return Err(Error::invalid(
            "a replacement list is required for, and only allowed with, replace_spheres",
        ));
    }
    let frame = scene.trajectory.frames()[0];
    let interior: Vec<usize> = scene
        .spheres
        .iter()
        .enumerate()
        .filter(|(_, s)| {
            project_point(&frame.intrinsics, &frame.pose, &s.track[0])
                .is_some_and(|p| d.mask.is_interior(p.u, p.v))
        })
        .map(|(i, _)| i)
        .collect();
    match d.mode {
        EditMode::FreezeCamera => {
            scene.trajectory = scene.trajectory.map_poses(|_| CameraPose::identity());
        }
        EditMode::FreezeSpheres => {
            let mut changed = false;
            for &i in &interior {
                let s = &mut scene.spheres.spheres[i];
                let first = s.track[0];
                if s.track.iter().any(|p| *p != first) {
                    s.track.iter_mut().for_each(|p| *p = first);
                    changed = true;
                }
            }
            if changed {
                scene.spheres.renormalize()?;
            }
        }
        EditMode::ReplaceSpheres => {
            let tracks = d.replacement.as_ref().expect("checked above");
            if tracks.len() > interior.len() {
                return Err(Error::invalid(format!(
                    "{} replacement tracks for {} spheres inside the mask",
                    tracks.len(),
                    interior.len()
                )));
            }
            let mut free = interior;
            for (n, track) in tracks.iter().enumerate() {
                if track.len() != scene.frame_count() {
                    return Err(Error::invalid(format!(
                        "replacement {n} has {} positions, scene has {} frames",
                        track.len(),
                        scene.frame_count()
                    )));
                }
                let start = project_point(&frame.intrinsics, &frame.pose, &track[0])
                    .ok_or_else(|| {
                        Error::OutOfFrame(format!("replacement {n} starts behind the camera"))
                    })?;
                let pick = nearest_sphere(scene, Point2::new(start.u, start.v), free.iter().copied())
                    .ok_or_else(|| {
                        Error::OutOfFrame(format!(
                            "no masked sphere within {MATCH_RADIUS_PX} px of replacement {n}"
                        ))
                    })?;
                free.retain(|&i| i != pick);
                let color = scene.color_for_start(&track[0]);
                let s = &mut scene.spheres.spheres[pick];
                s.track = track.clone();
                s.color = color;
            }
            if !tracks.is_empty() {
                scene.spheres.renormalize()?;
            }
        }
    }
    Ok(())
}

/// Applies directives in order. Spheres and poses not selected by a directive are left untouched.
pub fn edit_motion(scene: &MotionScene, directives: &[EditDirective]) -> Result<MotionScene> {
    let mut out = scene.clone();
    for d in directives {
        apply_directive(&mut out, d)?;
    }
    out.validate()?;
    Ok(out)
}

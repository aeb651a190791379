//! Clip curation (motion scoring and low-motion filtering) and the
//! dense-to-sparse sphere selection used to train with few spheres.

use std::path::Path;

use nalgebra::{Point2, Point3};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Mask;
use crate::io::{poses, tracks};
use crate::scene::{
    align_to_first_frame, build_scene, default_intrinsics, CameraPose, CameraTrajectory, MotionScene,
    RenderParams, Sphere, WorldEnvelope,
};

/// Largest sparse selection drawn by [`sparsify`].
pub const MAX_SPARSE_SPHERES: usize = 16;

/// Dense per-pixel displacement field, row-major `(du, dv)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    width: u32,
    height: u32,
    vectors: Vec<[f32; 2]>,
}

impl FlowField {
    pub fn new(width: u32, height: u32, vectors: Vec<[f32; 2]>) -> Result<Self> {
        if vectors.len() != width as usize * height as usize {
            return Err(Error::invalid(format!(
                "flow of {width}x{height} needs {} vectors, got {}",
                width as usize * height as usize,
                vectors.len()
            )));
        }
        if vectors.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("flow contains non-finite values"));
        }
        Ok(FlowField {
            width,
            height,
            vectors,
        })
    }

    pub fn uniform(width: u32, height: u32, du: f32, dv: f32) -> Self {
        FlowField {
            width,
            height,
            vectors: vec![[du, dv]; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn vectors(&self) -> &[[f32; 2]] {
        &self.vectors
    }

    /// Frobenius norm of the `(u, v)` tensor divided by `sqrt(W * H)`.
    pub fn normalized_frobenius(&self) -> f64 {
        let pixels = self.vectors.len();
        if pixels == 0 {
            return 0.0;
        }
        let sum: f64 = self
            .vectors
            .iter()
            .map(|[u, v]| (*u as f64).powi(2) + (*v as f64).powi(2))
            .sum();
        (sum / pixels as f64).sqrt()
    }
}

/// Mean resolution-normalized Frobenius norm over a clip's flow fields.
pub fn motion_score(flows: &[FlowField]) -> Result<f64> {
    let first = flows
        .first()
        .ok_or_else(|| Error::invalid("motion score needs at least one flow field"))?;
    if let Some(i) = flows
        .iter()
        .position(|f| (f.width, f.height) != (first.width, first.height))
    {
        return Err(Error::invalid(format!(
            "flow {i} is {}x{}, expected {}x{}",
            flows[i].width, flows[i].height, first.width, first.height
        )));
    }
    let total: f64 = flows.iter().map(FlowField::normalized_frobenius).sum();
    Ok(total / flows.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipRecord {
    pub clip_id: String,
    pub motion_score: f64,
    #[serde(default)]
    pub frame_count: usize,
}

/// Nearest-rank percentile: the `ceil(p/100 * M)`-th smallest value (at least the first).
pub fn nearest_rank(values: &[f64], percentile: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid("percentile of an empty sample"));
    }
    if !(0.0..=100.0).contains(&percentile) {
        return Err(Error::invalid(format!("percentile {percentile} outside [0, 100]")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((percentile * sorted.len() as f64) / 100.0).ceil() as usize;
    Ok(sorted[rank.clamp(1, sorted.len()) - 1])
}

/// Drops clips scoring strictly below the nearest-rank `percentile`, preserving order.
pub fn filter_corpus(records: &[ClipRecord], percentile: f64) -> Result<Vec<ClipRecord>> {
    if records.is_empty() {
        return Err(Error::invalid("cannot filter an empty corpus"));
    }
    if let Some(r) = records
        .iter()
        .find(|r| !(r.motion_score.is_finite() && r.motion_score >= 0.0))
    {
        return Err(Error::invalid(format!(
            "clip {:?} has invalid motion score {}",
            r.clip_id, r.motion_score
        )));
    }
    let scores: Vec<f64> = records.iter().map(|r| r.motion_score).collect();
    let threshold = nearest_rank(&scores, percentile)?;
    Ok(records
        .iter()
        .filter(|r| r.motion_score >= threshold)
        .cloned()
        .collect())
}

/// Cell centers of a `rows x cols` grid over the image, row-major.
pub fn seed_grid(width: u32, height: u32, rows: u32, cols: u32) -> Vec<Point2<f64>> {
    let (w, h) = (width as f64, height as f64);
    (0..rows)
        .flat_map(|r| {
            (0..cols).map(move |c| {
                Point2::new(
                    (c as f64 + 0.5) * w / cols as f64,
                    (r as f64 + 0.5) * h / rows as f64,
                )
            })
        })
        .collect()
}

/// Sum of consecutive 3D displacements.
pub fn trajectory_length(sphere: &Sphere) -> f64 {
    sphere
        .track
        .windows(2)
        .map(|w| (w[1] - w[0]).norm())
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsifySelection {
    pub set1_ids: Vec<u32>,
    pub set2_ids: Vec<u32>,
    pub sampled_ids: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SparsifyOutcome {
    Selected(SparsifySelection),
    /// Neither the mask nor the length criterion picked any sphere.
    Empty,
}

impl SparsifyOutcome {
    pub fn selection(&self) -> Option<&SparsifySelection> {
        match self {
            SparsifyOutcome::Selected(s) => Some(s),
            SparsifyOutcome::Empty => None,
        }
    }
}

/// Ids of spheres whose frame-1 projected center falls on an interior mask pixel.
pub fn spheres_in_mask(scene: &MotionScene, mask: &Mask) -> Result<Vec<u32>> {
    if mask.dims() != (scene.width, scene.height) {
        return Err(Error::invalid(format!(
            "mask is {:?}, scene is {}x{}",
            mask.dims(),
            scene.width,
            scene.height
        )));
    }
    let frame = &scene.trajectory.frames()[0];
    Ok(scene
        .spheres
        .iter()
        .filter(|s| {
            crate::render::project_point(&frame.intrinsics, &frame.pose, &s.track[0])
                .is_some_and(|p| mask.is_interior(p.u, p.v))
        })
        .map(|s| s.id)
        .collect())
}

/// Set1 (salient-mask spheres) ∪ Set2 (lengths strictly above the 80th
/// percentile), then `N ∈ {1..=min(16, |union|)}` spheres sampled uniformly
/// without replacement. Deterministic for a given seed.
pub fn sparsify(scene: &MotionScene, mask: &Mask, seed: u64) -> Result<SparsifyOutcome> {
    let set1 = spheres_in_mask(scene, mask)?;
    let set2: Vec<u32> = if scene.spheres.is_empty() {
        Vec::new()
    } else {
        let lengths: Vec<f64> = scene.spheres.iter().map(trajectory_length).collect();
        let threshold = nearest_rank(&lengths, 80.0)?;
        scene
            .spheres
            .iter()
            .zip(&lengths)
            .filter(|(_, &len)| len > threshold)
            .map(|(s, _)| s.id)
            .collect()
    };
    let union: Vec<u32> = scene
        .spheres
        .iter()
        .map(|s| s.id)
        .filter(|id| set1.contains(id) || set2.contains(id))
        .collect();
    if union.is_empty() {
        return Ok(SparsifyOutcome::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=union.len().min(MAX_SPARSE_SPHERES));
    let mut sampled: Vec<u32> = index::sample(&mut rng, union.len(), n)
        .into_iter()
        .map(|i| union[i])
        .collect();
    sampled.sort_unstable();
    Ok(SparsifyOutcome::Selected(SparsifySelection {
        set1_ids: set1,
        set2_ids: set2,
        sampled_ids: sampled,
    }))
}

/// Scene restricted to the given sphere ids; sphere data is kept as is.
pub fn retain_spheres(scene: &MotionScene, ids: &[u32]) -> MotionScene {
    let mut out = scene.clone();
    out.spheres.spheres.retain(|s| ids.contains(&s.id));
    out
}

/// Construction settings for [`ingest_clip`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IngestParams {
    pub envelope: WorldEnvelope,
    pub render_params: Option<RenderParams>,
}

/// Builds a scene from raw estimator outputs: per-frame world tracks and
/// world-to-camera poses in the estimator's world frame. Poses are re-based
/// on frame 1 and the tracks moved into that frame.
pub fn scene_from_raw(
    width: u32,
    height: u32,
    raw_poses: &[CameraPose],
    track_set: &tracks::TrackSet,
    params: &IngestParams,
) -> Result<MotionScene> {
    let poses = raw_poses;
    if poses.len() != track_set.frames {
        return Err(Error::invalid(format!(
            "pose file has {} frames, track file has {}",
            poses.len(),
            track_set.frames
        )));
    }
    let aligned = align_to_first_frame(poses)?;
    let to_first = poses[0];
    let k = default_intrinsics(width, height)?;
    let trajectory = CameraTrajectory::from_parts(&vec![k; aligned.len()], &aligned)?;
    let per_point: Vec<Vec<Point3<f64>>> = track_set
        .per_point()
        .into_iter()
        .map(|t| t.iter().map(|p| to_first.transform_point(p)).collect())
        .collect();
    build_scene(
        width,
        height,
        trajectory,
        &per_point,
        params.envelope.clone(),
        params
            .render_params
            .unwrap_or_else(|| RenderParams::default_for(width, height)),
    )
}

/// File-level wrapper over [`scene_from_raw`].
pub fn ingest_clip(
    tracks_file: &Path,
    poses_file: &Path,
    dims: (u32, u32),
    params: &IngestParams,
) -> Result<MotionScene> {
    let track_set = tracks::read_tracks_file(tracks_file)?;
    let raw = poses::read_poses_file(poses_file)?;
    scene_from_raw(dims.0, dims.1, &raw, &track_set, params)
}

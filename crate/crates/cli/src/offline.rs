use std::path::{Path, PathBuf};

use clap::Args;
use motionscene::camera_paths::{
    compose, generate, rot_err, trans_err, CameraMoveSpec, MoveKind,
};
use motionscene::curation::{
    filter_corpus, motion_score, retain_spheres, sparsify as sparsify_scene, ClipRecord,
    IngestParams, SparsifyOutcome,
};
use motionscene::io::flow::read_flow;
use motionscene::io::poses::{format_intrinsics, read_poses_file, write_poses};
use motionscene::io::raster::{encode_png, read_depth, read_mask, read_rgb};
use motionscene::io::scene_doc::{read_scene, write_scene};
use motionscene::manipulation::{
    add_sphere, edit_motion, lift_trajectory, transfer_motion, CorrespondencePair,
    EditDirective, UserTrajectory,
};
use motionscene::render::{composite, render_range};
use motionscene::{
    align_to_first_frame, default_intrinsics, CameraIntrinsics, CameraTrajectory, MotionScene,
    RenderParams, WorldEnvelope,
};
use nalgebra::{Point2, Point3};
use serde::{Deserialize, Serialize};

use crate::failure::Failure;
use crate::output_or_stdout;

type CmdResult = Result<(), Failure>;

#[derive(Debug, Args)]
pub struct CurateArgs {
    /// Binary TRK1 track file.
    #[arg(long)]
    pub tracks: PathBuf,
    /// Pose text file (12 or 7 floats per line).
    #[arg(long)]
    pub poses: PathBuf,
    #[arg(long)]
    pub width: u32,
    #[arg(long)]
    pub height: u32,
    /// Side length of the envelope cube.
    #[arg(long)]
    pub envelope_side: Option<f64>,
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Scene document to write.
    #[arg(short, long)]
    pub output: PathBuf,
}

pub fn curate(a: CurateArgs) -> CmdResult {
    let mut params = IngestParams::default();
    if let Some(side) = a.envelope_side {
        params.envelope = WorldEnvelope::with_side(side);
    }
    if a.r_min.is_some() || a.r_max.is_some() {
        let mut rp = RenderParams::default_for(a.width, a.height);
        rp.r_min = a.r_min.unwrap_or(rp.r_min);
        rp.r_max = a.r_max.unwrap_or(rp.r_max);
        params.render_params = Some(rp);
    }
    let scene =
        motionscene::curation::ingest_clip(&a.tracks, &a.poses, (a.width, a.height), &params)?;
    scene.check_envelope()?;
    write_scene(&a.output, &scene)?;
    Ok(())
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Clip directories; every `*.flo` file inside is one flow field.
    #[arg(required = true)]
    pub clips: Vec<PathBuf>,
    /// CSV manifest to write instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn flow_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Failure::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("flo")))
        .collect();
    files.sort();
    Ok(files)
}

fn clip_id(dir: &Path) -> String {
    dir.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| dir.display().to_string())
}

pub fn score(a: ScoreArgs) -> CmdResult {
    let mut out = csv::Writer::from_writer(Vec::new());
    for dir in &a.clips {
        let files = flow_files(dir)?;
        let flows = files
            .iter()
            .map(|f| read_flow(f))
            .collect::<motionscene::Result<Vec<_>>>()?;
        let record = ClipRecord {
            clip_id: clip_id(dir),
            motion_score: motion_score(&flows)?,
            frame_count: flows.len() + 1,
        };
        out.serialize(&record)?;
    }
    let bytes = out.into_inner().map_err(|e| Failure::new("io-error", e.to_string()))?;
    output_or_stdout(&a.output, &String::from_utf8_lossy(&bytes))
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// CSV with columns clip_id, motion_score[, frame_count].
    pub manifest: PathBuf,
    #[arg(long, default_value_t = 30.0)]
    pub percentile: f64,
    /// Keep list to write instead of stdout, one clip id per line.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn filter(a: FilterArgs) -> CmdResult {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(&a.manifest)?;
    let records = reader
        .deserialize()
        .collect::<Result<Vec<ClipRecord>, _>>()?;
    let kept = filter_corpus(&records, a.percentile)?;
    let text: String = kept.iter().map(|r| format!("{}\n", r.clip_id)).collect();
    output_or_stdout(&a.output, &text)
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Scene document.
    pub scene: PathBuf,
    /// Output directory.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Reference image for an additional composite layer.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Composite blend opacity.
    #[arg(long, default_value_t = 0.5)]
    pub opacity: f64,
    #[arg(long)]
    pub first: Option<usize>,
    #[arg(long)]
    pub last: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RenderManifest {
    pub width: u32,
    pub height: u32,
    pub frames: Vec<usize>,
    pub spheres: Vec<String>,
    pub envelope: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub composite: Vec<String>,
}

fn write_png(dir: &Path, sub: &str, n: usize, png: &[u8]) -> Result<String, Failure> {
    let rel = format!("{sub}/frame_{n:04}.png");
    let path = dir.join(&rel);
    std::fs::write(&path, png).map_err(|e| Failure::io(&path, e))?;
    Ok(rel)
}

pub fn render(a: RenderArgs) -> CmdResult {
    let scene = read_scene(&a.scene)?;
    let first = a.first.unwrap_or(1);
    let last = a.last.unwrap_or(scene.frame_count());
    let reference = match &a.reference {
        Some(p) => {
            if !(0.0..=1.0).contains(&a.opacity) {
                return Err(Failure::invalid(format!("opacity {} outside [0, 1]", a.opacity)));
            }
            Some(read_rgb(p)?)
        }
        None => None,
    };
    let frames = render_range(&scene, first, last)?;
    let mut subs = vec!["spheres", "envelope"];
    if reference.is_some() {
        subs.push("composite");
    }
    for sub in &subs {
        let dir = a.output.join(sub);
        std::fs::create_dir_all(&dir).map_err(|e| Failure::io(&dir, e))?;
    }
    let mut manifest = RenderManifest {
        width: scene.width,
        height: scene.height,
        frames: (first..=last).collect(),
        spheres: Vec::new(),
        envelope: Vec::new(),
        composite: Vec::new(),
    };
    for f in &frames {
        let n = f.frame_index;
        manifest
            .spheres
            .push(write_png(&a.output, "spheres", n, &encode_png(&f.sphere_layer)?)?);
        manifest
            .envelope
            .push(write_png(&a.output, "envelope", n, &encode_png(&f.envelope_layer)?)?);
        if let Some(r) = &reference {
            let img = composite(r, f, a.opacity)?;
            manifest
                .composite
                .push(write_png(&a.output, "composite", n, &encode_png(&img)?)?);
        }
    }
    let path = a.output.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    std::fs::write(&path, text).map_err(|e| Failure::io(&path, e))?;
    Ok(())
}

#[derive(Debug, Args)]
pub struct CamgenArgs {
    /// Move as `kind` or `kind:magnitude`, e.g. `pan_left:20`. Repeated moves
    /// are composed in order.
    #[arg(long = "move", required = true)]
    pub moves: Vec<String>,
    #[arg(long)]
    pub frames: usize,
    #[arg(long)]
    pub width: u32,
    #[arg(long)]
    pub height: u32,
    /// Orbit pivot distance along the initial principal ray.
    #[arg(long)]
    pub pivot_distance: Option<f64>,
    /// Pose file to write.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Per-frame intrinsics file, needed to keep zoom moves.
    #[arg(long)]
    pub intrinsics_output: Option<PathBuf>,
}

pub fn parse_move(text: &str, frames: usize) -> Result<CameraMoveSpec, Failure> {
    let (kind, magnitude) = match text.split_once(':') {
        Some((k, m)) => {
            let m: f64 = m
                .trim()
                .parse()
                .map_err(|_| Failure::invalid(format!("bad magnitude in move {text:?}")))?;
            (k, m)
        }
        None => (text, 0.0),
    };
    let kind: MoveKind = kind.parse()?;
    Ok(CameraMoveSpec::new(kind, magnitude, frames))
}

pub fn camgen(a: CamgenArgs) -> CmdResult {
    let k = default_intrinsics(a.width, a.height)?;
    let mut trajectory: Option<CameraTrajectory> = None;
    for m in &a.moves {
        let mut spec = parse_move(m, a.frames)?;
        spec.pivot_distance = a.pivot_distance;
        let next = generate(&spec, k)?;
        trajectory = Some(match trajectory {
            None => next,
            Some(prev) => compose(&prev, &next)?,
        });
    }
    let trajectory = trajectory.expect("clap requires at least one move");
    write_poses(&a.output, trajectory.poses())?;
    if let Some(path) = &a.intrinsics_output {
        let text = format_intrinsics(trajectory.frames().iter().map(|f| &f.intrinsics));
        std::fs::write(path, text).map_err(|e| Failure::io(path, e))?;
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct SparsifyArgs {
    pub scene: PathBuf,
    /// Salient-object mask image.
    #[arg(long)]
    pub mask: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Reduced scene document.
    #[arg(short, long)]
    pub output: PathBuf,
}

pub fn sparsify(a: SparsifyArgs) -> CmdResult {
    let scene = read_scene(&a.scene)?;
    let mask = read_mask(&a.mask)?;
    match sparsify_scene(&scene, &mask, a.seed)? {
        SparsifyOutcome::Empty => {
            println!("{}", serde_json::json!({ "outcome": "empty-selection" }));
        }
        SparsifyOutcome::Selected(sel) => {
            write_scene(&a.output, &retain_spheres(&scene, &sel.sampled_ids))?;
            println!(
                "{}",
                serde_json::json!({ "outcome": "selected", "selection": sel })
            );
        }
    }
    Ok(())
}

/// Whitespace-separated float rows; blank lines and `#` comments skipped.
fn read_rows(path: &Path) -> Result<Vec<(usize, Vec<f64>)>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let values = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| {
                Failure::new("parse-error", format!("{}:{}: {e}", path.display(), i + 1))
            })?;
        rows.push((i + 1, values));
    }
    Ok(rows)
}

/// Rows of 2 floats (pixels) or 3 floats (world points).
pub fn read_user_trajectory(path: &Path, depth_hint: Option<f64>) -> Result<UserTrajectory, Failure> {
    let rows = read_rows(path)?;
    let dim = rows.first().map(|r| r.1.len()).unwrap_or(0);
    if !(dim == 2 || dim == 3) {
        return Err(Failure::new(
            "parse-error",
            format!("{}: expected rows of 2 or 3 floats", path.display()),
        ));
    }
    if let Some((line, _)) = rows.iter().find(|r| r.1.len() != dim) {
        return Err(Failure::new(
            "parse-error",
            format!("{}:{line}: expected {dim} floats", path.display()),
        ));
    }
    Ok(if dim == 2 {
        UserTrajectory::pixels(rows.iter().map(|r| Point2::new(r.1[0], r.1[1])).collect(), depth_hint)
    } else {
        UserTrajectory::world(
            rows.iter()
                .map(|r| Point3::new(r.1[0], r.1[1], r.1[2]))
                .collect(),
        )
    })
}

#[derive(Debug, Args)]
pub struct LiftArgs {
    pub scene: PathBuf,
    /// Trajectory file: rows of `u v` pixels or `x y z` world points.
    #[arg(long)]
    pub trajectory: PathBuf,
    /// Metric depth of the reference image (16-bit PNG with sidecar, or text grid).
    #[arg(long)]
    pub depth: Option<PathBuf>,
    /// Constant depth for a pixel trajectory, overriding the depth map.
    #[arg(long)]
    pub depth_hint: Option<f64>,
    #[arg(short, long)]
    pub output: PathBuf,
}

pub fn lift(a: LiftArgs) -> CmdResult {
    let scene = read_scene(&a.scene)?;
    let traj = read_user_trajectory(&a.trajectory, a.depth_hint)?;
    let depth = a.depth.as_deref().map(read_depth).transpose()?;
    let track = lift_trajectory(&traj, depth.as_ref(), &scene)?;
    let (scene, id) = add_sphere(&scene, track)?;
    write_scene(&a.output, &scene)?;
    println!("{}", serde_json::json!({ "sphere": id }));
    Ok(())
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    /// Source scene document.
    pub source: PathBuf,
    /// Correspondences: rows of `source_u source_v target_u target_v`.
    #[arg(long)]
    pub pairs: PathBuf,
    /// Metric depth of the target image; its size sets the output size.
    #[arg(long)]
    pub depth: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
}

pub fn transfer(a: TransferArgs) -> CmdResult {
    let source = read_scene(&a.source)?;
    let rows = read_rows(&a.pairs)?;
    let pairs = rows
        .iter()
        .map(|(line, v)| match v.as_slice() {
            [su, sv, tu, tv] => Ok(CorrespondencePair {
                source: Point2::new(*su, *sv),
                target: Point2::new(*tu, *tv),
            }),
            _ => Err(Failure::new(
                "parse-error",
                format!("{}:{line}: expected 4 floats", a.pairs.display()),
            )),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let depth = read_depth(&a.depth)?;
    let dims = depth.dims();
    let scene = transfer_motion(&source, &pairs, &depth, dims)?;
    write_scene(&a.output, &scene)?;
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
enum DirectiveDoc {
    FreezeSpheres { mask: PathBuf },
    FreezeCamera { mask: PathBuf },
    ReplaceSpheres { mask: PathBuf, tracks: Vec<Vec<[f64; 3]>> },
}

#[derive(Debug, Args)]
pub struct EditArgs {
    pub scene: PathBuf,
    /// JSON list of directives; mask paths are relative to this file.
    #[arg(long)]
    pub directives: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
}

pub fn edit(a: EditArgs) -> CmdResult {
    let scene = read_scene(&a.scene)?;
    let text = std::fs::read_to_string(&a.directives).map_err(|e| Failure::io(&a.directives, e))?;
    let docs: Vec<DirectiveDoc> = serde_json::from_str(&text)?;
    let base = a.directives.parent().unwrap_or(Path::new("."));
    let directives = docs
        .into_iter()
        .map(|d| {
            Ok(match d {
                DirectiveDoc::FreezeSpheres { mask } => {
                    EditDirective::freeze_spheres(read_mask(&base.join(mask))?)
                }
                DirectiveDoc::FreezeCamera { mask } => {
                    EditDirective::freeze_camera(read_mask(&base.join(mask))?)
                }
                DirectiveDoc::ReplaceSpheres { mask, tracks } => EditDirective::replace_spheres(
                    read_mask(&base.join(mask))?,
                    tracks
                        .into_iter()
                        .map(|t| t.into_iter().map(Point3::from).collect())
                        .collect(),
                ),
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let edited: MotionScene = edit_motion(&scene, &directives)?;
    write_scene(&a.output, &edited)?;
    Ok(())
}

#[derive(Debug, Args)]
pub struct EvalCamArgs {
    /// Ground-truth pose file.
    pub reference: PathBuf,
    /// Predicted pose file.
    pub predicted: PathBuf,
}

fn aligned_trajectory(path: &Path) -> Result<CameraTrajectory, Failure> {
    let poses = align_to_first_frame(&read_poses_file(path)?)?;
    // the metrics only look at poses
    let k = CameraIntrinsics::new(1.0, 1.0, 0.0, 0.0);
    Ok(CameraTrajectory::from_parts(&vec![k; poses.len()], &poses)?)
}

pub fn eval_cam(a: EvalCamArgs) -> CmdResult {
    let gt = aligned_trajectory(&a.reference)?;
    let pred = aligned_trajectory(&a.predicted)?;
    println!("RotErr {:.6}", rot_err(&gt, &pred)?);
    println!("TransErr {:.6}", trans_err(&gt, &pred)?);
    Ok(())
}

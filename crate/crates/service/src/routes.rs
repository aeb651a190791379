use std::sync::Arc;

use axum::body::{Body, Bytes};
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use base64::Engine as _;
use motionscene::camera_paths::{compose, generate, CameraMoveSpec};
use motionscene::io::raster::{decode_png, encode_png};
use motionscene::io::scene_doc::{serialize_scene, FrameDoc};
use motionscene::manipulation::{
    add_sphere, lift_trajectory, remove_sphere, replace_sphere_track, UserTrajectory,
};
use motionscene::render::{composite, render_frame, ControlSignalFrame};
use motionscene::{
    align_to_first_frame, build_scene, default_intrinsics, CameraIntrinsics, CameraPose,
    CameraTrajectory, DepthMap, MotionScene, RenderParams, Sphere, WorldEnvelope,
};
use nalgebra::{Matrix3, Point2, Vector3};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::api::*;
use crate::error::ApiError;
use crate::state::{Session, SessionHandle, Store};

type AppState = Arc<Store>;
type ApiResult<T> = Result<T, ApiError>;

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(session_info).delete(delete_session))
        .route("/sessions/{id}/camera", get(get_camera).put(put_camera))
        .route("/sessions/{id}/spheres", get(list_spheres).post(draw_sphere))
        .route(
            "/sessions/{id}/spheres/{sid}",
            put(redraw_sphere).delete(delete_sphere),
        )
        .route("/sessions/{id}/render", post(start_render))
        .route("/sessions/{id}/jobs/{job}", get(get_job))
        .route("/sessions/{id}/frames/{n}/{layer}", get(get_frame))
        .route("/sessions/{id}/scene", get(export_scene))
        .with_state(store)
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::invalid(format!("request body: {e}")))
}

fn sphere_doc(s: &Sphere) -> SphereDoc {
    SphereDoc {
        id: s.id,
        color: s.color,
        track: s.track.iter().map(|p| [p.x, p.y, p.z]).collect(),
        normalized_depths: s.normalized_depths.clone(),
    }
}

async fn create_session(State(store): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let req: CreateSession = parse_body(&body)?;
    let png = base64::engine::general_purpose::STANDARD
        .decode(req.reference_png.as_bytes())
        .map_err(|e| ApiError::invalid(format!("reference_png is not base64: {e}")))?;
    let reference = decode_png(&png)?;
    let (w, h) = reference.dimensions();
    let depth = match req.depth {
        None => None,
        Some(d) => {
            if (d.width, d.height) != (w, h) {
                return Err(ApiError::invalid(format!(
                    "depth map is {}x{}, reference image is {w}x{h}",
                    d.width, d.height
                )));
            }
            Some(DepthMap::from_vec(d.width, d.height, d.values)?)
        }
    };
    if req.frames == 0 {
        return Err(ApiError::invalid("frames must be at least 1"));
    }
    let k = default_intrinsics(w, h)?;
    let scene = build_scene(
        w,
        h,
        CameraTrajectory::fixed(k, req.frames)?,
        &[],
        WorldEnvelope::default(),
        RenderParams::default_for(w, h),
    )?;
    let handle = store.insert(|id| Session::new(id, reference, depth, scene));
    let info = handle.lock().info();
    tracing::info!(session = info.id, width = w, height = h, frames = info.frames, "session created");
    Ok((StatusCode::CREATED, Json(info)).into_response())
}

async fn session_info(State(store): State<AppState>, Path(id): Path<u64>) -> ApiResult<Json<SessionInfo>> {
    Ok(Json(store.get(id)?.lock().info()))
}

async fn delete_session(State(store): State<AppState>, Path(id): Path<u64>) -> ApiResult<StatusCode> {
    store.remove(id)?;
    Ok(StatusCode::NO_CONTENT)
}

async fn get_camera(State(store): State<AppState>, Path(id): Path<u64>) -> ApiResult<Json<CameraState>> {
    let handle = store.get(id)?;
    let s = handle.lock();
    Ok(Json(CameraState {
        version: s.version(),
        frames: s.scene().trajectory.frames().iter().map(FrameDoc::from).collect(),
    }))
}

fn preset(spec: &CameraMoveSpec, frames: usize, k: CameraIntrinsics) -> ApiResult<CameraTrajectory> {
    if spec.frames != frames {
        return Err(ApiError::invalid(format!(
            "camera move has {} frames, session has {frames}",
            spec.frames
        )));
    }
    Ok(generate(spec, k)?)
}

fn trajectory_for(update: &CameraUpdate, scene: &MotionScene) -> ApiResult<CameraTrajectory> {
    let l = scene.frame_count();
    let k = default_intrinsics(scene.width, scene.height)?;
    match update {
        CameraUpdate::Preset { spec } => preset(spec, l, k),
        CameraUpdate::Compose { first, second } => {
            Ok(compose(&preset(first, l, k)?, &preset(second, l, k)?)?)
        }
        CameraUpdate::Poses { poses, intrinsics } => {
            if poses.len() != l {
                return Err(ApiError::invalid(format!(
                    "{} poses for a {l}-frame session",
                    poses.len()
                )));
            }
            let raw = poses
                .iter()
                .map(|p| {
                    let r = &p.rotation;
                    CameraPose::new(
                        Matrix3::new(
                            r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1],
                            r[2][2],
                        ),
                        Vector3::from(p.translation),
                    )
                })
                .collect::<motionscene::Result<Vec<_>>>()?;
            let aligned = align_to_first_frame(&raw)?;
            let ks: Vec<CameraIntrinsics> = match intrinsics {
                None => vec![k; l],
                Some(list) => list
                    .iter()
                    .map(|i| CameraIntrinsics::new(i.fx, i.fy, i.cx, i.cy))
                    .collect(),
            };
            Ok(CameraTrajectory::from_parts(&ks, &aligned)?)
        }
    }
}

async fn put_camera(
    State(store): State<AppState>,
    Path(id): Path<u64>,
    body: Bytes,
) -> ApiResult<Json<CameraState>> {
    let update: CameraUpdate = parse_body(&body)?;
    let handle = store.get(id)?;
    let mut s = handle.lock();
    let mut scene = MotionScene::clone(s.scene());
    scene.trajectory = trajectory_for(&update, &scene)?;
    scene.check_envelope()?;
    // frame-1 intrinsics may have changed, and colors follow the frame-1 view
    for i in 0..scene.spheres.len() {
        let c = scene.color_for_start(&scene.spheres.spheres[i].track[0]);
        scene.spheres.spheres[i].color = c;
    }
    scene.validate()?;
    let version = s.commit(scene);
    Ok(Json(CameraState {
        version,
        frames: s.scene().trajectory.frames().iter().map(FrameDoc::from).collect(),
    }))
}

async fn list_spheres(State(store): State<AppState>, Path(id): Path<u64>) -> ApiResult<Json<SphereList>> {
    let handle = store.get(id)?;
    let s = handle.lock();
    Ok(Json(SphereList {
        version: s.version(),
        spheres: s.scene().spheres.iter().map(sphere_doc).collect(),
    }))
}

fn lift(s: &Session, drawn: &DrawnTrajectory) -> ApiResult<Vec<nalgebra::Point3<f64>>> {
    let points = drawn.points.iter().map(|p| Point2::new(p[0], p[1])).collect();
    let traj = UserTrajectory::pixels(points, drawn.depth_hint);
    Ok(lift_trajectory(&traj, s.depth.as_ref(), s.scene())?)
}

async fn draw_sphere(
    State(store): State<AppState>,
    Path(id): Path<u64>,
    body: Bytes,
) -> ApiResult<Response> {
    let drawn: DrawnTrajectory = parse_body(&body)?;
    let handle = store.get(id)?;
    let mut s = handle.lock();
    let track = lift(&s, &drawn)?;
    let (scene, sid) = add_sphere(s.scene(), track)?;
    let version = s.commit(scene);
    let sphere = s.scene().spheres.get(sid).map(sphere_doc);
    Ok((StatusCode::CREATED, Json(SphereChange { version, sphere })).into_response())
}

async fn redraw_sphere(
    State(store): State<AppState>,
    Path((id, sid)): Path<(u64, u32)>,
    body: Bytes,
) -> ApiResult<Json<SphereChange>> {
    let drawn: DrawnTrajectory = parse_body(&body)?;
    let handle = store.get(id)?;
    let mut s = handle.lock();
    if s.scene().spheres.get(sid).is_none() {
        return Err(ApiError::NotFound(format!("no sphere {sid} in session {id}")));
    }
    let track = lift(&s, &drawn)?;
    let scene = replace_sphere_track(s.scene(), sid, track)?;
    let version = s.commit(scene);
    let sphere = s.scene().spheres.get(sid).map(sphere_doc);
    Ok(Json(SphereChange { version, sphere }))
}

async fn delete_sphere(
    State(store): State<AppState>,
    Path((id, sid)): Path<(u64, u32)>,
) -> ApiResult<Json<SphereChange>> {
    let handle = store.get(id)?;
    let mut s = handle.lock();
    if s.scene().spheres.get(sid).is_none() {
        return Err(ApiError::NotFound(format!("no sphere {sid} in session {id}")));
    }
    let scene = remove_sphere(s.scene(), sid)?;
    let version = s.commit(scene);
    Ok(Json(SphereChange { version, sphere: None }))
}

fn check_frame(scene: &MotionScene, n: usize) -> ApiResult<()> {
    scene.trajectory.frame(n)?;
    Ok(())
}

/// Cached frame for the snapshot, rendering and caching it on a miss.
async fn frame_at(handle: &SessionHandle, n: usize) -> ApiResult<(Arc<ControlSignalFrame>, u64, bool)> {
    let (scene, version, cached) = {
        let s = handle.lock();
        check_frame(s.scene(), n)?;
        let (scene, version) = s.snapshot();
        (scene, version, s.cached(n))
    };
    if let Some(frame) = cached {
        return Ok((frame, version, true));
    }
    let frame = tokio::task::spawn_blocking(move || render_frame(&scene, n))
        .await
        .map_err(|e| ApiError::invalid(format!("render task failed: {e}")))??;
    let frame = Arc::new(frame);
    handle.lock().store(version, frame.clone());
    Ok((frame, version, false))
}

async fn start_render(
    State(store): State<AppState>,
    Path(id): Path<u64>,
    body: Bytes,
) -> ApiResult<Response> {
    let req: RenderRequest = parse_body(&body)?;
    let handle = store.get(id)?;
    let job = {
        let mut s = handle.lock();
        let l = s.scene().frame_count();
        if req.first == 0 || req.first > req.last || req.last > l {
            return Err(ApiError::invalid(format!(
                "frame range {}..={} outside [1, {l}]",
                req.first, req.last
            )));
        }
        let version = s.version();
        s.add_job(RenderJob {
            id: 0,
            version,
            status: JobStatus::Pending,
            first: req.first,
            rendered: vec![false; req.last - req.first + 1],
            error: None,
        })
    };
    let job_id = job.id;
    let worker = handle.clone();
    tokio::spawn(async move {
        worker.lock().update_job(job_id, |j| j.status = JobStatus::Running);
        for n in req.first..=req.last {
            match frame_at(&worker, n).await {
                Ok(_) => worker
                    .lock()
                    .update_job(job_id, |j| j.rendered[n - req.first] = true),
                Err(e) => {
                    let detail = e.detail();
                    worker.lock().update_job(job_id, |j| {
                        j.status = JobStatus::Failed;
                        j.error = Some(detail);
                    });
                    return;
                }
            }
        }
        worker.lock().update_job(job_id, |j| j.status = JobStatus::Done);
    });
    Ok((StatusCode::ACCEPTED, Json(job)).into_response())
}

async fn get_job(
    State(store): State<AppState>,
    Path((id, job)): Path<(u64, u64)>,
) -> ApiResult<Json<RenderJob>> {
    let handle = store.get(id)?;
    let s = handle.lock();
    s.job(job)
        .cloned()
        .map(Json)
        .ok_or_else(|| ApiError::NotFound(format!("no job {job} in session {id}")))
}

#[derive(Debug, Deserialize)]
struct FrameQuery {
    opacity: Option<f64>,
}

async fn get_frame(
    State(store): State<AppState>,
    Path((id, n, layer)): Path<(u64, usize, String)>,
    Query(q): Query<FrameQuery>,
    headers: HeaderMap,
) -> ApiResult<Response> {
    let layer: LayerKind = layer.parse().map_err(ApiError::invalid)?;
    let opacity = q.opacity.unwrap_or(0.5);
    if layer == LayerKind::Composite && !(0.0..=1.0).contains(&opacity) {
        return Err(ApiError::invalid(format!("opacity {opacity} outside [0, 1]")));
    }
    let handle = store.get(id)?;
    let (frame, version, hit) = frame_at(&handle, n).await?;
    let etag = match layer {
        LayerKind::Composite => format!("\"v{version}-f{n}-composite-{}\"", opacity.to_bits()),
        other => format!("\"v{version}-f{n}-{}\"", other.as_str()),
    };
    let cache = if hit { "hit" } else { "miss" };
    let mut builder = Response::builder()
        .header(VERSION_HEADER, version.to_string())
        .header(CACHE_HEADER, cache)
        .header(header::ETAG, &etag);
    if headers
        .get(header::IF_NONE_MATCH)
        .is_some_and(|v| v.as_bytes() == etag.as_bytes())
    {
        builder = builder.status(StatusCode::NOT_MODIFIED);
        return Ok(builder.body(Body::empty()).expect("valid response"));
    }
    let png = match layer {
        LayerKind::Spheres => encode_png(&frame.sphere_layer)?,
        LayerKind::Envelope => encode_png(&frame.envelope_layer)?,
        LayerKind::Composite => {
            let reference = handle.lock().reference.clone();
            encode_png(&composite(&reference, &frame, opacity)?)?
        }
    };
    Ok(builder
        .header(header::CONTENT_TYPE, HeaderValue::from_static("image/png"))
        .body(Body::from(png))
        .expect("valid response"))
}

async fn export_scene(State(store): State<AppState>, Path(id): Path<u64>) -> ApiResult<Response> {
    let handle = store.get(id)?;
    let (scene, version) = handle.lock().snapshot();
    Ok((
        [
            (header::CONTENT_TYPE, "application/json".to_string()),
            (header::HeaderName::from_static(VERSION_HEADER), version.to_string()),
        ],
        serialize_scene(&scene),
    )
        .into_response())
}

mod common;

use motionscene::camera_paths::{compose, generate, CameraMoveSpec, MoveKind};
use motionscene::curation::{ingest_clip, seed_grid, sparsify, IngestParams, SparsifyOutcome};
use motionscene::io::poses::write_poses;
use motionscene::io::scene_doc::{read_scene, write_scene};
use motionscene::io::tracks::{write_tracks, TrackSet};
use motionscene::manipulation::{add_sphere, lift_trajectory, UserTrajectory};
use motionscene::render::{oracle_render, render_frame, render_scene, Layer};
use motionscene::{default_intrinsics, CameraPose, Error, Mask};
use nalgebra::{Point2, Point3, Rotation3, Vector3};

fn grid_tracks(frames: usize) -> TrackSet {
    let k = default_intrinsics(768, 512).unwrap();
    let id = CameraPose::identity();
    let tracks: Vec<Vec<Point3<f64>>> = seed_grid(768, 512, 25, 25)
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let x = motionscene::render::unproject_pixel(&k, &id, p.x, p.y, 5.0 + (i % 9) as f64).unwrap();
            (0..frames).map(|l| x + Vector3::new(0.01 * l as f64, 0.0, 0.0)).collect()
        })
        .collect();
    TrackSet::from_per_point(&tracks).unwrap()
}

#[test]
fn ingest_sixteen_frame_grid_clip() {
    let dir = tempfile::tempdir().unwrap();
    let tracks = dir.path().join("clip.trk");
    let poses = dir.path().join("clip.pose");
    write_tracks(&tracks, &grid_tracks(16)).unwrap();
    // estimator world frame differs from frame 1
    let offset = CameraPose::new(
        *Rotation3::from_euler_angles(0.1, 0.2, 0.3).matrix(),
        Vector3::new(1.0, 2.0, 3.0),
    )
    .unwrap();
    let raw: Vec<CameraPose> = (0..16)
        .map(|l| {
            let step = CameraPose::new(
                *Rotation3::from_axis_angle(&Vector3::y_axis(), 0.01 * l as f64).matrix(),
                Vector3::new(0.0, 0.0, -0.05 * l as f64),
            )
            .unwrap();
            step.compose(&offset)
        })
        .collect();
    write_poses(&poses, &raw).unwrap();

    let scene = ingest_clip(&tracks, &poses, (768, 512), &IngestParams::default()).unwrap();
    assert_eq!(scene.frame_count(), 16);
    assert_eq!(scene.spheres.len(), 625);
    assert!(scene.trajectory.frames()[0].pose.is_identity(1e-9));
    assert!(scene.validate().is_ok());
    assert_eq!(render_scene(&scene).unwrap().len(), 16);
}

#[test]
fn ingest_length_mismatch_and_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let tracks = dir.path().join("clip.trk");
    let poses = dir.path().join("clip.pose");
    write_tracks(&tracks, &grid_tracks(8)).unwrap();
    write_poses(&poses, &vec![CameraPose::identity(); 16]).unwrap();
    let e = ingest_clip(&tracks, &poses, (768, 512), &IngestParams::default()).unwrap_err();
    assert_eq!(e.kind(), "invalid-argument");

    let bytes = std::fs::read(&tracks).unwrap();
    std::fs::write(&tracks, &bytes[..bytes.len() - 5]).unwrap();
    let e = ingest_clip(&tracks, &poses, (768, 512), &IngestParams::default()).unwrap_err();
    assert_eq!(e.kind(), "truncated");
    assert!(e.to_string().contains("byte"), "{e}");
    assert!(e.to_string().contains("clip.trk"), "{e}");
}

#[test]
fn scene_file_round_trip_renders_identically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scene.json");
    let mut rng = common::rng(7);
    for _ in 0..10 {
        let scene = common::random_scene(&mut rng, 48, 8, 6);
        write_scene(&path, &scene).unwrap();
        let back = read_scene(&path).unwrap();
        assert_eq!(render_scene(&back).unwrap(), render_scene(&scene).unwrap());
    }
}

#[test]
fn oracle_matches_on_benchmark_frames() {
    let scene = common::benchmark_scene(8);
    for f in [1, 8, 16] {
        let fast = render_frame(&scene, f).unwrap();
        assert_eq!(fast.sphere_layer, oracle_render(&scene, f, Layer::Spheres).unwrap());
        assert_eq!(fast.envelope_layer, oracle_render(&scene, f, Layer::Envelope).unwrap());
    }
}

#[test]
fn escaping_dolly_reports_frame() {
    let k = default_intrinsics(64, 64).unwrap();
    let traj = generate(&CameraMoveSpec::new(MoveKind::DollyIn, 75.0, 4), k).unwrap();
    let scene = motionscene::build_scene(
        64,
        64,
        traj,
        &[],
        motionscene::WorldEnvelope::default(),
        motionscene::RenderParams::default_for(64, 64),
    )
    .unwrap();
    let e = render_scene(&scene).unwrap_err();
    assert!(matches!(e, Error::CameraEscapedEnvelope { frame: 3 }), "{e:?}");
    assert!(matches!(scene.check_envelope(), Err(Error::CameraEscapedEnvelope { frame: 3 })));
}

#[test]
fn pan_plus_zoom_keeps_both_parameters() {
    let k = default_intrinsics(768, 512).unwrap();
    let pan = generate(&CameraMoveSpec::new(MoveKind::PanLeft, 30.0, 4), k).unwrap();
    let zoom = generate(&CameraMoveSpec::new(MoveKind::ZoomIn, 2.0, 4), k).unwrap();
    let both = compose(&pan, &zoom).unwrap();
    let last = both.frames()[3];
    assert!((last.intrinsics.fx - 1536.0).abs() < 1e-9);
    let yaw = motionscene::camera_paths::rotation_angle_deg(&nalgebra::Matrix3::identity(), &last.pose.rotation);
    assert!((yaw - 30.0).abs() < 1e-9);
}

#[test]
fn drawn_trajectory_becomes_visible_sphere() {
    let k = default_intrinsics(96, 64).unwrap();
    let scene = motionscene::build_scene(
        96,
        64,
        motionscene::CameraTrajectory::fixed(k, 3).unwrap(),
        &[],
        motionscene::WorldEnvelope::default(),
        motionscene::RenderParams { r_min: 3.0, r_max: 6.0 },
    )
    .unwrap();
    let track = lift_trajectory(
        &UserTrajectory::pixels(vec![Point2::new(20.5, 30.5), Point2::new(70.5, 30.5)], Some(3.0)),
        None,
        &scene,
    )
    .unwrap();
    let (scene, id) = add_sphere(&scene, track).unwrap();
    assert_eq!(id, 0);
    let frames = render_scene(&scene).unwrap();
    let color = scene.spheres.spheres[0].color;
    assert_eq!(frames[0].sphere_layer.get_pixel(20, 30).0, color);
    assert_eq!(frames[1].sphere_layer.get_pixel(45, 30).0, color);
    assert_eq!(frames[2].sphere_layer.get_pixel(70, 30).0, color);
}

#[test]
fn sparsify_empty_selection() {
    let k = default_intrinsics(32, 32).unwrap();
    let tracks = vec![vec![Point3::new(0.0, 0.0, 3.0); 2]; 5];
    let scene = motionscene::build_scene(
        32,
        32,
        motionscene::CameraTrajectory::fixed(k, 2).unwrap(),
        &tracks,
        motionscene::WorldEnvelope::default(),
        motionscene::RenderParams::default_for(32, 32),
    )
    .unwrap();
    assert_eq!(sparsify(&scene, &Mask::filled(32, 32, false), 1).unwrap(), SparsifyOutcome::Empty);
}

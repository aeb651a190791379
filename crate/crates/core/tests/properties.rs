mod common;

use std::collections::HashSet;

use motionscene::camera_paths::{generate, rot_err, trans_err, CameraMoveSpec, MoveKind};
use motionscene::curation::{
    filter_corpus, motion_score, seed_grid, sparsify, trajectory_length, ClipRecord, FlowField,
    SparsifyOutcome,
};
use motionscene::io::poses::{format_poses, parse_poses};
use motionscene::io::scene_doc::{parse_scene, serialize_scene};
use motionscene::manipulation::{
    clone_motion, edit_motion, fit_similarity, lift_trajectory, transfer_motion,
    CorrespondencePair, EditDirective, UserTrajectory,
};
use motionscene::render::{
    project_point, project_sphere_set, render_envelope_layer, render_scene, unproject_pixel,
};
use motionscene::scene::color_at;
use motionscene::{
    align_to_first_frame, build_scene, default_intrinsics, normalize_depths, CameraIntrinsics,
    CameraPose, CameraTrajectory, DepthMap, Mask, RenderParams, Sphere, WorldEnvelope,
};
use nalgebra::{Point2, Point3, Vector2, Vector3};
use proptest::prelude::*;
use rand::Rng;

fn pose_from_seed(seed: u64) -> CameraPose {
    let mut rng = common::rng(seed);
    let r = common::random_rotation(&mut rng, std::f64::consts::PI);
    CameraPose::from_center(
        *r.matrix(),
        Point3::new(
            rng.random_range(-20.0..20.0),
            rng.random_range(-20.0..20.0),
            rng.random_range(-20.0..20.0),
        ),
    )
}

fn translational() -> impl Strategy<Value = MoveKind> {
    prop::sample::select(
        MoveKind::ALL
            .iter()
            .copied()
            .filter(|k| k.is_translation())
            .collect::<Vec<_>>(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn align_is_idempotent(seeds in prop::collection::vec(any::<u64>(), 1..8)) {
        let raw: Vec<CameraPose> = seeds.iter().map(|&s| pose_from_seed(s)).collect();
        let once = align_to_first_frame(&raw).unwrap();
        let twice = align_to_first_frame(&once).unwrap();
        for (a, b) in once.iter().zip(&twice) {
            prop_assert!(a.approx_eq(b, 1e-9));
        }
        prop_assert!(once[0].is_identity(1e-9));
    }

    #[test]
    fn normalize_is_affine_invariant(
        z in prop::collection::vec(-100.0f64..100.0, 1..40),
        a in 0.01f64..100.0,
        b in -100.0f64..100.0,
    ) {
        let base = normalize_depths(&z).unwrap();
        let moved: Vec<f64> = z.iter().map(|v| a * v + b).collect();
        let other = normalize_depths(&moved).unwrap();
        for (x, y) in base.iter().zip(&other) {
            prop_assert!((x - y).abs() <= 1e-9, "{x} vs {y}");
        }
    }

    #[test]
    fn colors_resolve_at_granularity(
        w in 2u32..2000, h in 2u32..2000, fu in 0.0f64..1.0, fv in 0.0f64..1.0, axis_u in any::<bool>(),
    ) {
        let (du, dv) = ((w - 1).div_ceil(255) as f64, (h - 1).div_ceil(255) as f64);
        let u = fu * ((w - 1) as f64 - du);
        let v = fv * ((h - 1) as f64 - dv);
        let (u2, v2) = if axis_u { (u + du, v) } else { (u, v + dv) };
        prop_assert_ne!(color_at(u, v, w, h), color_at(u2, v2, w, h));
    }

    #[test]
    fn built_scenes_validate(seed in any::<u64>()) {
        let scene = common::random_scene(&mut common::rng(seed), 64, 10, 8);
        prop_assert!(scene.validate().is_ok());
        for f in scene.trajectory.frames() {
            let r = f.pose.rotation;
            prop_assert!((r.transpose() * r - nalgebra::Matrix3::identity()).amax() < 1e-6);
        }
    }

    #[test]
    fn radius_strictly_decreases_with_depth(seed in any::<u64>()) {
        let scene = common::random_scene(&mut common::rng(seed), 64, 10, 8);
        prop_assume!(scene.render_params.r_max > scene.render_params.r_min);
        for f in 1..=scene.frame_count() {
            let circles: Vec<_> = project_sphere_set(&scene, f).unwrap().into_iter().filter(|c| c.visible).collect();
            for a in &circles {
                for b in &circles {
                    if a.depth < b.depth {
                        prop_assert!(a.radius > b.radius);
                    }
                }
            }
        }
    }

    #[test]
    fn projection_round_trip(
        seed in any::<u64>(), u in -500.0f64..1500.0, v in -500.0f64..1500.0, d in 0.001f64..500.0,
    ) {
        let k = CameraIntrinsics::new(768.0, 512.0, 384.0, 256.0);
        let pose = pose_from_seed(seed);
        let x = unproject_pixel(&k, &pose, u, v, d).unwrap();
        let p = project_point(&k, &pose, &x).unwrap();
        prop_assert!((p.u - u).abs() <= 1e-6 && (p.v - v).abs() <= 1e-6 && (p.z - d).abs() <= 1e-6);
    }

    #[test]
    fn envelope_covers_every_pixel(seed in any::<u64>()) {
        let scene = common::random_scene(&mut common::rng(seed), 48, 0, 4);
        let env = &scene.envelope;
        let mut palette = HashSet::new();
        for tint in env.face_tints {
            for c in [env.color_a, env.color_b] {
                palette.insert(match tint {
                    None => c,
                    Some(m) => [0, 1, 2].map(|k| (c[k] as f64 * m[k]).round().clamp(0.0, 255.0) as u8),
                });
            }
        }
        for f in 1..=scene.frame_count() {
            let img = render_envelope_layer(&scene, f).unwrap();
            prop_assert!(img.pixels().all(|p| palette.contains(&p.0)));
        }
    }

    #[test]
    fn doubling_focal_scales_about_principal_point(seed in any::<u64>(), x in -5.0f64..5.0, y in -5.0f64..5.0, z in 0.5f64..20.0) {
        let k = CameraIntrinsics::new(768.0, 512.0, 384.0, 256.0);
        let pose = pose_from_seed(seed);
        let cam = Point3::new(x, y, z);
        let world = pose.inverse().transform_point(&cam);
        let p1 = project_point(&k, &pose, &world).unwrap();
        let p2 = project_point(&k.scaled_focal(2.0), &pose, &world).unwrap();
        prop_assert!((p2.u - (2.0 * (p1.u - 384.0) + 384.0)).abs() <= 1e-6);
        prop_assert!((p2.v - (2.0 * (p1.v - 256.0) + 256.0)).abs() <= 1e-6);
    }

    #[test]
    fn generated_trajectories_start_at_identity(
        kind in prop::sample::select(MoveKind::ALL.to_vec()), magnitude in 0.1f64..40.0, frames in 1usize..20,
    ) {
        let t = generate(&CameraMoveSpec::new(kind, magnitude, frames), default_intrinsics(768, 512).unwrap()).unwrap();
        prop_assert_eq!(t.len(), frames);
        prop_assert!(t.frames()[0].pose.is_identity(1e-9));
    }

    #[test]
    fn translational_moves_stay_inside(kind in translational(), fraction in 0.0f64..1.0, frames in 2usize..20) {
        let env = WorldEnvelope::default();
        let magnitude = fraction * env.half_side() * 0.999_999;
        let t = generate(&CameraMoveSpec::new(kind, magnitude, frames), default_intrinsics(64, 64).unwrap()).unwrap();
        prop_assert!(t.poses().all(|p| env.contains(&p.center())));
    }

    #[test]
    fn orbit_keeps_pivot_centered(angle in -170.0f64..170.0, frames in 2usize..20, pivot in 1.0f64..40.0) {
        let k = default_intrinsics(768, 512).unwrap();
        let kind = if angle >= 0.0 { MoveKind::OrbitLeft } else { MoveKind::OrbitRight };
        let mut spec = CameraMoveSpec::new(kind, angle.abs(), frames);
        spec.pivot_distance = Some(pivot);
        let t = generate(&spec, k).unwrap();
        for f in t.frames() {
            let p = project_point(&f.intrinsics, &f.pose, &Point3::new(0.0, 0.0, pivot)).unwrap();
            prop_assert!((p.u - 384.0).abs() <= 0.5 && (p.v - 256.0).abs() <= 0.5);
        }
    }

    #[test]
    fn camera_metrics_are_symmetric(a in prop::collection::vec(any::<u64>(), 1..8), b_seed in any::<u64>()) {
        let k = default_intrinsics(64, 64).unwrap();
        let pa: Vec<_> = a.iter().map(|&s| pose_from_seed(s)).collect();
        let pb: Vec<_> = a.iter().map(|&s| pose_from_seed(s ^ b_seed)).collect();
        let ks = vec![k; pa.len()];
        let ta = CameraTrajectory::from_parts(&ks, &pa).unwrap();
        let tb = CameraTrajectory::from_parts(&ks, &pb).unwrap();
        let r = rot_err(&ta, &tb).unwrap();
        let t = trans_err(&ta, &tb).unwrap();
        prop_assert!(r >= 0.0 && t >= 0.0);
        prop_assert!((r - rot_err(&tb, &ta).unwrap()).abs() <= 1e-9);
        prop_assert!((t - trans_err(&tb, &ta).unwrap()).abs() <= 1e-12);
        prop_assert_eq!(rot_err(&ta, &ta).unwrap(), 0.0);
        prop_assert_eq!(trans_err(&ta, &ta).unwrap(), 0.0);
    }

    #[test]
    fn rot_err_survives_pose_file_round_trip(a in prop::collection::vec(any::<u64>(), 1..8)) {
        let k = default_intrinsics(64, 64).unwrap();
        let poses: Vec<_> = a.iter().map(|&s| pose_from_seed(s)).collect();
        let back = parse_poses(&format_poses(&poses)).unwrap();
        let ks = vec![k; poses.len()];
        let r = rot_err(
            &CameraTrajectory::from_parts(&ks, &poses).unwrap(),
            &CameraTrajectory::from_parts(&ks, &back).unwrap(),
        ).unwrap();
        prop_assert!(r < 1e-6);
    }

    #[test]
    fn filter_removes_ceil_minus_one(scores in prop::collection::hash_set(0u32..1_000_000, 1..200)) {
        let records: Vec<ClipRecord> = scores
            .iter()
            .map(|&s| ClipRecord { clip_id: s.to_string(), motion_score: s as f64 / 1000.0, frame_count: 16 })
            .collect();
        let m = records.len();
        let kept = filter_corpus(&records, 30.0).unwrap().len();
        let rank = (30 * m).div_ceil(100).max(1);
        prop_assert_eq!(m - kept, rank - 1);
    }

    #[test]
    fn uniform_motion_score_ignores_resolution(
        w in 1u32..64, h in 1u32..64, w2 in 1u32..64, h2 in 1u32..64, du in -20.0f32..20.0, dv in -20.0f32..20.0,
    ) {
        let a = motion_score(&[FlowField::uniform(w, h, du, dv)]).unwrap();
        let b = motion_score(&[FlowField::uniform(w2, h2, du, dv)]).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }

    #[test]
    fn sparsify_stays_in_union(seed in any::<u64>(), sample_seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let scene = common::random_scene(&mut rng, 48, 40, 4);
        let mut mask = Mask::filled(scene.width, scene.height, false);
        for _ in 0..rng.random_range(0..30) {
            mask.set(rng.random_range(0..scene.width), rng.random_range(0..scene.height), true);
        }
        let a = sparsify(&scene, &mask, sample_seed).unwrap();
        prop_assert_eq!(&a, &sparsify(&scene, &mask, sample_seed).unwrap());
        if let SparsifyOutcome::Selected(sel) = a {
            prop_assert!((1..=16).contains(&sel.sampled_ids.len()));
            prop_assert!(sel.sampled_ids.iter().all(|id| sel.set1_ids.contains(id) || sel.set2_ids.contains(id)));
        }
    }

    #[test]
    fn trajectory_length_rigid_and_scale(
        pts in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0, -10.0f64..10.0), 1..10),
        shift in (-50.0f64..50.0, -50.0f64..50.0, -50.0f64..50.0),
        scale in 0.01f64..100.0,
    ) {
        let track: Vec<Point3<f64>> = pts.iter().map(|&(x, y, z)| Point3::new(x, y, z)).collect();
        let sphere = |track: Vec<Point3<f64>>| Sphere {
            id: 0,
            normalized_depths: vec![0.5; track.len()],
            track,
            color: [0, 0, 0],
        };
        let base = trajectory_length(&sphere(track.clone()));
        let t = Vector3::new(shift.0, shift.1, shift.2);
        let moved = trajectory_length(&sphere(track.iter().map(|p| p + t).collect()));
        let scaled = trajectory_length(&sphere(track.iter().map(|p| Point3::from(p.coords * scale)).collect()));
        prop_assert!((base - moved).abs() <= 1e-9 * (1.0 + base));
        prop_assert!((scaled - scale * base).abs() <= 1e-9 * (1.0 + scale * base));
    }

    #[test]
    fn seed_grid_strictly_inside(w in 1u32..4000, h in 1u32..4000, rows in 1u32..60, cols in 1u32..60) {
        let pts = seed_grid(w, h, rows, cols);
        prop_assert_eq!(pts.len(), (rows * cols) as usize);
        prop_assert!(pts.iter().all(|p| p.x > 0.0 && p.y > 0.0 && p.x < w as f64 && p.y < h as f64));
    }

    #[test]
    fn lift_reproduces_drawn_points(seed in any::<u64>(), depth in 0.05f64..80.0) {
        let mut rng = common::rng(seed);
        let scene = common::random_scene(&mut rng, 64, 3, 8);
        let drawn: Vec<Point2<f64>> = (0..scene.frame_count())
            .map(|_| Point2::new(rng.random_range(0.0..scene.width as f64), rng.random_range(0.0..scene.height as f64)))
            .collect();
        let track = lift_trajectory(&UserTrajectory::pixels(drawn.clone(), Some(depth)), None, &scene).unwrap();
        let f = scene.trajectory.frames()[0];
        for (p, x) in drawn.iter().zip(&track) {
            let q = project_point(&f.intrinsics, &f.pose, x).unwrap();
            prop_assert!((q.u - p.x).abs() <= 1e-6 && (q.v - p.y).abs() <= 1e-6);
        }
    }

    #[test]
    fn freeze_edits_are_idempotent(seed in any::<u64>(), camera in any::<bool>()) {
        let mut rng = common::rng(seed);
        let scene = common::random_scene(&mut rng, 48, 10, 6);
        let mut mask = Mask::filled(scene.width, scene.height, false);
        for _ in 0..rng.random_range(0..200) {
            mask.set(rng.random_range(0..scene.width), rng.random_range(0..scene.height), true);
        }
        let d = if camera { EditDirective::freeze_camera(mask) } else { EditDirective::freeze_spheres(mask) };
        let once = edit_motion(&scene, std::slice::from_ref(&d)).unwrap();
        prop_assert_eq!(edit_motion(&once, &[d]).unwrap(), once);
    }

    #[test]
    fn clone_renders_identically(seed in any::<u64>()) {
        let scene = common::random_scene(&mut common::rng(seed), 32, 6, 4);
        prop_assert_eq!(render_scene(&clone_motion(&scene)).unwrap(), render_scene(&scene).unwrap());
    }

    #[test]
    fn similarity_fit_recovers_exact_maps(
        src in prop::collection::vec((-500.0f64..500.0, -500.0f64..500.0), 2..10),
        s in 0.05f64..20.0,
        t in (-300.0f64..300.0, -300.0f64..300.0),
    ) {
        let t = Vector2::new(t.0, t.1);
        let pairs: Vec<CorrespondencePair> = src
            .iter()
            .map(|&(x, y)| {
                let p = Point2::new(x, y);
                CorrespondencePair { source: p, target: Point2::from(p.coords * s + t) }
            })
            .collect();
        let spread = pairs.iter().map(|p| (p.source - pairs[0].source).norm()).fold(0.0, f64::max);
        prop_assume!(spread > 1e-3);
        let fit = fit_similarity(&pairs).unwrap();
        for p in &pairs {
            prop_assert!((fit.apply(p.source) - p.target).norm() <= 1e-9 * (1.0 + p.target.coords.norm()));
        }
    }

    #[test]
    fn identity_transfer_keeps_projections(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let k = default_intrinsics(128, 96).unwrap();
        let poses: Vec<CameraPose> = (0..5)
            .map(|l| if l == 0 {
                CameraPose::identity()
            } else {
                let r = common::random_rotation(&mut rng, 0.05);
                CameraPose::from_center(*r.matrix(), Point3::new(rng.random_range(-0.2..0.2), 0.0, rng.random_range(-0.2..0.2)))
            })
            .collect();
        let start = Point3::new(rng.random_range(-1.0..1.0), rng.random_range(-0.5..0.5), rng.random_range(4.0..8.0));
        let track: Vec<_> = (0..5).map(|l| start + Vector3::new(0.03, 0.02, 0.05) * l as f64).collect();
        let source = build_scene(
            128, 96, CameraTrajectory::from_parts(&[k; 5], &poses).unwrap(), &[track],
            WorldEnvelope::default(), RenderParams::default_for(128, 96),
        ).unwrap();
        let p = project_point(&k, &poses[0], &start).unwrap();
        let anchor = Point2::new(p.u, p.v);
        let out = transfer_motion(
            &source, &[CorrespondencePair { source: anchor, target: anchor }],
            &DepthMap::filled(128, 96, rng.random_range(0.5..30.0)), (128, 96),
        ).unwrap();
        for l in 0..5 {
            let f = source.trajectory.frames()[l];
            let a = project_point(&f.intrinsics, &f.pose, &source.spheres.spheres[0].track[l]).unwrap();
            let g = out.trajectory.frames()[l];
            let b = project_point(&g.intrinsics, &g.pose, &out.spheres.spheres[0].track[l]).unwrap();
            prop_assert!((a.u - b.u).abs() <= 1e-6 && (a.v - b.v).abs() <= 1e-6);
        }
    }

    #[test]
    fn document_round_trip_renders_identically(seed in any::<u64>()) {
        let scene = common::random_scene(&mut common::rng(seed), 32, 6, 4);
        let parsed = parse_scene(&serialize_scene(&scene)).unwrap();
        prop_assert_eq!(&parsed, &scene);
        prop_assert_eq!(render_scene(&parsed).unwrap(), render_scene(&scene).unwrap());
    }
}

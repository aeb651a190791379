#![allow(dead_code)]

use motionscene::{
    build_scene, CameraFrame, CameraIntrinsics, CameraPose, CameraTrajectory, MotionScene,
    RenderParams, WorldEnvelope,
};
use nalgebra::{Point3, Rotation3, Unit, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_rotation(rng: &mut impl Rng, max_angle: f64) -> Rotation3<f64> {
    let axis = Vector3::new(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    );
    let axis = Unit::try_new(axis, 1e-6).unwrap_or(Vector3::y_axis());
    Rotation3::from_axis_angle(&axis, rng.random_range(-max_angle..=max_angle))
}

fn random_envelope(rng: &mut impl Rng) -> WorldEnvelope {
    let side = rng.random_range(8.0..200.0);
    let mut env = WorldEnvelope::with_side(side);
    env.checker_cell = side / rng.random_range(1.0..40.0);
    env.color_a = rng.random();
    env.color_b = rng.random();
    for t in env.face_tints.iter_mut() {
        *t = if rng.random_bool(0.3) {
            None
        } else {
            Some([
                rng.random_range(0.0..1.3),
                rng.random_range(0.0..1.3),
                rng.random_range(0.0..1.3),
            ])
        };
    }
    env
}

/// A valid scene within the given size limits: frame 1 at identity, every
/// camera center inside the envelope, some spheres possibly behind the camera.
pub fn random_scene(
    rng: &mut impl Rng,
    max_side: u32,
    max_spheres: usize,
    max_frames: usize,
) -> MotionScene {
    let w = rng.random_range(2..=max_side);
    let h = rng.random_range(2..=max_side);
    let l = rng.random_range(1..=max_frames);
    let n = rng.random_range(0..=max_spheres);
    let envelope = random_envelope(rng);
    let half = envelope.half_side();

    let base = CameraIntrinsics::new(
        w as f64 * rng.random_range(0.5..2.0),
        h as f64 * rng.random_range(0.5..2.0),
        rng.random_range(0.0..w as f64),
        rng.random_range(0.0..h as f64),
    );
    let mut frames = vec![CameraFrame {
        intrinsics: base,
        pose: CameraPose::identity(),
    }];
    for _ in 1..l {
        let orientation = random_rotation(rng, std::f64::consts::PI);
        let center = Point3::new(
            rng.random_range(-0.9..0.9) * half,
            rng.random_range(-0.9..0.9) * half,
            rng.random_range(-0.9..0.9) * half,
        );
        frames.push(CameraFrame {
            intrinsics: base.scaled_focal(rng.random_range(0.7..1.5)),
            pose: CameraPose::from_center(*orientation.matrix(), center),
        });
    }
    let trajectory = CameraTrajectory::new(frames).unwrap();

    let tracks: Vec<Vec<Point3<f64>>> = (0..n)
        .map(|_| {
            let mut p = Point3::new(
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-1.0..10.0),
            );
            (0..l)
                .map(|_| {
                    let q = p;
                    p += Vector3::new(
                        rng.random_range(-0.5..0.5),
                        rng.random_range(-0.5..0.5),
                        rng.random_range(-0.5..0.5),
                    );
                    q
                })
                .collect()
        })
        .collect();
    let r_min = rng.random_range(0.0..6.0);
    let params = RenderParams {
        r_min,
        r_max: r_min + rng.random_range(0.0..12.0),
    };
    build_scene(w, h, trajectory, &tracks, envelope, params).unwrap()
}

/// 768x512, 16 frames, pan plus dolly, `side * side` spheres spread over the view.
pub fn benchmark_scene(side: usize) -> MotionScene {
    use motionscene::camera_paths::{compose, generate, CameraMoveSpec, MoveKind};
    let k = motionscene::default_intrinsics(768, 512).unwrap();
    let pan = generate(&CameraMoveSpec::new(MoveKind::PanLeft, 20.0, 16), k).unwrap();
    let dolly = generate(&CameraMoveSpec::new(MoveKind::DollyIn, 2.0, 16), k).unwrap();
    let trajectory = compose(&pan, &dolly).unwrap();
    let mut tracks = Vec::with_capacity(side * side);
    for r in 0..side {
        for c in 0..side {
            let x = -3.0 + 6.0 * (c as f64 + 0.5) / side as f64;
            let y = -2.0 + 4.0 * (r as f64 + 0.5) / side as f64;
            let z = 6.0 + ((r * side + c) % 7) as f64;
            tracks.push(
                (0..16)
                    .map(|l| Point3::new(x + 0.05 * l as f64, y, z - 0.1 * l as f64))
                    .collect(),
            );
        }
    }
    build_scene(
        768,
        512,
        trajectory,
        &tracks,
        WorldEnvelope::default(),
        RenderParams::default_for(768, 512),
    )
    .unwrap()
}

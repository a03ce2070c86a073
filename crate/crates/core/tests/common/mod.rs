//! Shared fixtures for integration tests.

#![allow(dead_code)]

use motion_forge_core::math::{Quat, Vec3};
use motion_forge_core::sequence::{Frame, PoseSequence};
use motion_forge_core::skeleton::{Body, SkeletonSpec};
use std::collections::BTreeMap;

pub fn body(
    name: &str,
    parent: Option<usize>,
    offset: [f64; 3],
    axis: Option<[f64; 3]>,
    z_offset: f64,
) -> Body {
    Body {
        name: name.into(),
        parent,
        offset: Vec3::new(offset[0], offset[1], offset[2]),
        joint_axis: axis.map(|a| Vec3::new(a[0], a[1], a[2])),
        z_offset,
        mass: 1.0,
    }
}

/// Ten-body humanoid: pelvis, torso, two shoulders, and two three-link legs.
///
/// Rest pose (identity root at origin) puts the feet at z = -0.75 with a
/// -0.03 sole offset, so a root height of 0.78 rests the feet exactly on the
/// ground.
pub fn humanoid() -> SkeletonSpec {
    let y = Some([0.0, 1.0, 0.0]);
    let x = Some([1.0, 0.0, 0.0]);
    let bodies = vec![
        body("pelvis", None, [0.0, 0.0, 0.0], None, 0.0),
        body("torso", Some(0), [0.0, 0.0, 0.25], y, 0.0),
        body("l_shoulder", Some(1), [0.0, 0.2, 0.2], x, 0.0),
        body("r_shoulder", Some(1), [0.0, -0.2, 0.2], x, 0.0),
        body("l_thigh", Some(0), [0.0, 0.1, -0.05], y, 0.0),
        body("l_shin", Some(4), [0.0, 0.0, -0.35], y, 0.0),
        body("l_foot", Some(5), [0.0, 0.0, -0.35], y, -0.03),
        body("r_thigh", Some(0), [0.0, -0.1, -0.05], y, 0.0),
        body("r_shin", Some(7), [0.0, 0.0, -0.35], y, 0.0),
        body("r_foot", Some(8), [0.0, 0.0, -0.35], y, -0.03),
    ];
    let mut body_sets = BTreeMap::new();
    body_sets.insert("feet".to_string(), vec![6, 9]);
    body_sets.insert("shoulders".to_string(), vec![2, 3]);
    body_sets.insert("knees".to_string(), vec![5, 8]);
    body_sets.insert("ankles".to_string(), vec![6, 9]);
    body_sets.insert("undesired_contact_bodies".to_string(), vec![1]);
    SkeletonSpec {
        name: "humanoid10".into(),
        bodies,
        dof_map: (1..10).collect(),
        body_sets,
        joint_limits: vec![(-2.5, 2.5); 9],
    }
}

/// Root height at which the humanoid rest pose touches the ground.
pub const HUMANOID_STAND_HEIGHT: f64 = 0.78;

pub fn single_body_skeleton() -> SkeletonSpec {
    SkeletonSpec {
        name: "point".into(),
        bodies: vec![body("root", None, [0.0, 0.0, 0.0], None, 0.0)],
        dof_map: vec![],
        body_sets: BTreeMap::new(),
        joint_limits: vec![],
    }
}

/// Single-body sequence whose minimum body height equals the root height.
pub fn point_sequence(heights: &[f64]) -> PoseSequence {
    let frames = heights
        .iter()
        .map(|&z| Frame::new(Vec3::new(0.0, 0.0, z), Quat::IDENTITY, vec![]))
        .collect();
    PoseSequence::new(50.0, "point", frames)
}

/// Humanoid sequence standing at the given root heights with a fixed pose.
pub fn humanoid_sequence(heights: &[f64], joints: &[f64]) -> PoseSequence {
    assert_eq!(joints.len(), 9);
    let frames = heights
        .iter()
        .map(|&z| Frame::new(Vec3::new(0.0, 0.0, z), Quat::IDENTITY, joints.to_vec()))
        .collect();
    PoseSequence::new(50.0, "humanoid10", frames)
}

/// Canonical single-jump height profile for a point skeleton, all values
/// dyadic so corrected arithmetic is exact.
///
/// Layout: 10 contact frames at 0, a 4-frame climb of 0.125 m steps to an
/// apex of 0.5, `flight` frames of monotonically decreasing junk, a landing
/// frame at 0, then a short rise and hold.
pub struct JumpProfile {
    pub heights: Vec<f64>,
    /// Apex frame index (height maximum).
    pub take_off: usize,
    /// Landing frame index (height minimum).
    pub landing: usize,
}

pub fn point_jump_profile(flight: usize) -> JumpProfile {
    let mut heights = vec![0.0; 10];
    for k in 1..=4 {
        heights.push(0.125 * k as f64);
    }
    let take_off = heights.len() - 1;
    // Flight-phase junk: strictly decreasing, strictly above zero, so the
    // raw profile has no interior extrema.
    for k in 0..flight {
        heights.push(0.4375 * (flight - k) as f64 / flight as f64 + 0.03125);
    }
    heights.push(0.0);
    let landing = heights.len() - 1;
    heights.extend([0.03125, 0.0625, 0.0625, 0.0625, 0.0625]);
    JumpProfile { heights, take_off, landing }
}

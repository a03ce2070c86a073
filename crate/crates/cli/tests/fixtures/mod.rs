//! Synthetic drifting-motion fixtures for acceptance and CLI tests.

#![allow(dead_code)]

use motion_forge_core::math::{Quat, Vec3};
use motion_forge_core::sequence::{Frame, PoseSequence};
use motion_forge_core::skeleton::{Body, SkeletonSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Root height at which the humanoid rest pose touches the ground.
pub const STAND_HEIGHT: f64 = 0.78;

pub fn humanoid() -> SkeletonSpec {
    let mk = |name: &str, parent: Option<usize>, offset: [f64; 3], axis: Option<[f64; 3]>, z_offset: f64| Body {
        name: name.into(),
        parent,
        offset: Vec3::new(offset[0], offset[1], offset[2]),
        joint_axis: axis.map(|a| Vec3::new(a[0], a[1], a[2])),
        z_offset,
        mass: 1.0,
    };
    let y = Some([0.0, 1.0, 0.0]);
    let x = Some([1.0, 0.0, 0.0]);
    let bodies = vec![
        mk("pelvis", None, [0.0, 0.0, 0.0], None, 0.0),
        mk("torso", Some(0), [0.0, 0.0, 0.25], y, 0.0),
        mk("l_shoulder", Some(1), [0.0, 0.2, 0.2], x, 0.0),
        mk("r_shoulder", Some(1), [0.0, -0.2, 0.2], x, 0.0),
        mk("l_thigh", Some(0), [0.0, 0.1, -0.05], y, 0.0),
        mk("l_shin", Some(4), [0.0, 0.0, -0.35], y, 0.0),
        mk("l_foot", Some(5), [0.0, 0.0, -0.35], y, -0.03),
        mk("r_thigh", Some(0), [0.0, -0.1, -0.05], y, 0.0),
        mk("r_shin", Some(7), [0.0, 0.0, -0.35], y, 0.0),
        mk("r_foot", Some(8), [0.0, 0.0, -0.35], y, -0.03),
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

/// Drifting humanoid sequence: alternating stand phases (with floating or
/// penetrating offsets and small wobble) and jumps (fast take-off climb,
/// tucked flight, clean landing). 200-2000 frames depending on the
/// arguments.
pub fn drifting_sequence(seed: u64, jumps: usize, stand_len: usize) -> PoseSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let drifts: Vec<f64> = (0..=jumps).map(|_| rng.random_range(-0.12..0.15)).collect();
    let mut heights: Vec<f64> = Vec::new();
    let mut joints: Vec<Vec<f64>> = Vec::new();

    let stand = |base: f64, heights: &mut Vec<f64>, joints: &mut Vec<Vec<f64>>| {
        for i in 0..stand_len {
            // Millimeter wobble, above the plateau tolerance and far below
            // the auto-skip prominence.
            let wobble = ((i % 5) as f64) * 1.2e-3;
            heights.push(base + wobble);
            joints.push(vec![0.0; 9]);
        }
    };

    stand(STAND_HEIGHT + drifts[0], &mut heights, &mut joints);
    for j in 0..jumps {
        let base = *heights.last().unwrap();
        let apex = base + rng.random_range(0.35..0.65);
        // Fast climb: strictly rising, well above the velocity threshold.
        let climb = rng.random_range(3..6);
        for k in 1..=climb {
            heights.push(base + (apex - base) * k as f64 / climb as f64);
            joints.push(vec![0.0; 9]);
        }
        // Flight: decreasing junk heights with a leg tuck.
        let flight = rng.random_range(10..20);
        for k in 0..flight {
            heights.push(apex - (apex - base + 0.05) * (k + 1) as f64 / (flight + 1) as f64);
            let bend = 0.9 * (1.0 - ((k as f64 / flight as f64) * 2.0 - 1.0).abs());
            let mut jv = vec![0.0; 9];
            jv[4] = bend;
            jv[7] = bend;
            joints.push(jv);
        }
        // Landing minimum strictly below the junk tail and the next stand.
        let next_base = STAND_HEIGHT + drifts[j + 1];
        heights.push(base.min(next_base) - 0.07);
        joints.push(vec![0.0; 9]);
        stand(next_base, &mut heights, &mut joints);
    }

    let frames = heights
        .iter()
        .zip(&joints)
        .map(|(&z, jv)| Frame::new(Vec3::new(0.0, 0.0, z), Quat::IDENTITY, jv.clone()))
        .collect();
    PoseSequence::new(50.0, "humanoid10", frames)
}

/// Single-body skeleton whose minimum body height equals the root height.
pub fn point_skeleton() -> SkeletonSpec {
    SkeletonSpec {
        name: "point".into(),
        bodies: vec![Body {
            name: "root".into(),
            parent: None,
            offset: Vec3::ZERO,
            joint_axis: None,
            z_offset: 0.0,
            mass: 1.0,
        }],
        dof_map: vec![],
        body_sets: BTreeMap::new(),
        joint_limits: vec![],
    }
}

pub fn point_sequence(heights: &[f64]) -> PoseSequence {
    let frames = heights
        .iter()
        .map(|&z| Frame::new(Vec3::new(0.0, 0.0, z), Quat::IDENTITY, vec![]))
        .collect();
    PoseSequence::new(50.0, "point", frames)
}

/// Canonical dyadic jump profile: 10 contact frames, a 4-step climb to an
/// apex 0.5 above the landing, `flight` junk frames, landing at 0, short
/// rise and hold. Returns (heights, take_off, landing).
pub fn point_jump_profile(flight: usize) -> (Vec<f64>, usize, usize) {
    let mut heights = vec![0.0; 10];
    for k in 1..=4 {
        heights.push(0.125 * k as f64);
    }
    let take_off = heights.len() - 1;
    for k in 0..flight {
        heights.push(0.4375 * (flight - k) as f64 / flight as f64 + 0.03125);
    }
    heights.push(0.0);
    let landing = heights.len() - 1;
    heights.extend([0.03125, 0.0625, 0.0625, 0.0625, 0.0625]);
    (heights, take_off, landing)
}

/// Sequence whose height profile rises to a maximum and then descends
/// monotonically to the end: the maximum has no landing minimum, so the
/// correction flags it.
pub fn no_landing_sequence() -> PoseSequence {
    let mut heights = vec![0.4; 30];
    for k in 1..=10 {
        heights.push(0.4 + 0.05 * k as f64);
    }
    for k in 1..=20 {
        heights.push(0.9 - 0.02 * k as f64);
    }
    point_sequence(&heights)
}

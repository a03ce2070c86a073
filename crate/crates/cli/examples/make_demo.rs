//! Generate demo motion files: a drifting jump sequence and a fall-pose
//! pool for a small humanoid skeleton.
//!
//! Usage: cargo run -p motion-forge --example make_demo -- <output-dir>

use motion_forge_core::io::MotionFile;
use motion_forge_core::math::{Quat, Vec3};
use motion_forge_core::sequence::{Frame, PoseSequence};
use motion_forge_core::skeleton::{Body, SkeletonSpec};
use std::collections::BTreeMap;

fn demo_skeleton() -> SkeletonSpec {
    let mk = |name: &str,
              parent: Option<usize>,
              offset: [f64; 3],
              axis: Option<[f64; 3]>,
              z_offset: f64| Body {
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
        name: "demo_humanoid".into(),
        bodies,
        dof_map: (1..10).collect(),
        body_sets,
        joint_limits: vec![(-2.5, 2.5); 9],
    }
}

/// Standing phases float 8 cm off the ground; the jump lands 7 cm deep.
fn drifting_jump(frames_per_phase: usize) -> PoseSequence {
    let stand = 0.78;
    let mut heights = Vec::new();
    let mut joints: Vec<Vec<f64>> = Vec::new();
    for i in 0..frames_per_phase {
        heights.push(stand + 0.08 + ((i % 4) as f64) * 1.5e-3);
        joints.push(vec![0.0; 9]);
    }
    for k in 1..=4 {
        heights.push(stand + 0.08 + 0.12 * k as f64);
        joints.push(vec![0.0; 9]);
    }
    for k in 0..14 {
        heights.push(stand + 0.56 - 0.045 * (k + 1) as f64);
        let bend = 0.8 * (1.0 - ((k as f64 / 7.0) - 1.0).abs());
        let mut j = vec![0.0; 9];
        j[4] = bend;
        j[7] = bend;
        joints.push(j);
    }
    heights.push(stand - 0.07);
    joints.push(vec![0.0; 9]);
    for i in 0..frames_per_phase {
        heights.push(stand - 0.07 + 2e-3 + ((i % 4) as f64) * 1.5e-3);
        joints.push(vec![0.0; 9]);
    }
    let frames = heights
        .iter()
        .zip(&joints)
        .map(|(&z, j)| Frame::new(Vec3::new(0.0, 0.0, z), Quat::IDENTITY, j.clone()))
        .collect();
    PoseSequence::new(50.0, "demo_humanoid", frames)
}

fn fall_pool() -> PoseSequence {
    let poses = [
        (Quat::from_axis_angle(Vec3::new(0.0, 1.0, 0.0), 1.5), 0.3),
        (Quat::from_axis_angle(Vec3::new(1.0, 0.0, 0.0), -1.2), -0.7),
        (Quat::from_axis_angle(Vec3::new(0.0, 1.0, 0.0), 3.0), 0.9),
        (Quat::from_axis_angle(Vec3::new(1.0, 1.0, 0.0), 2.2), -0.2),
    ]
    .into_iter()
    .map(|(q, bend)| Frame::new(Vec3::new(0.0, 0.0, 0.4), q, vec![bend; 9]))
    .collect();
    PoseSequence::new(50.0, "demo_humanoid", poses)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "demo".into());
    let dir = std::path::PathBuf::from(dir);
    let sequences = dir.join("sequences");
    std::fs::create_dir_all(&sequences)?;
    let skel = demo_skeleton();
    MotionFile::save(sequences.join("jump_a.json"), &drifting_jump(60), &skel)?;
    MotionFile::save(sequences.join("jump_b.json"), &drifting_jump(90), &skel)?;
    MotionFile::save(dir.join("fall_pool.json"), &fall_pool(), &skel)?;
    println!("wrote demo files to {}", dir.display());
    Ok(())
}

//! Forward kinematics and finite-difference velocities.

use crate::error::{MotionError, Result};
use crate::math::{rotation_between, Quat, Vec3};
use crate::sequence::{Frame, PoseSequence};
use crate::skeleton::SkeletonSpec;

/// Tolerance for agreement between cached and recomputed body positions.
pub const FK_CACHE_TOLERANCE: f64 = 1e-9;

/// World-frame pose of every body in one frame.
#[derive(Debug, Clone)]
pub struct FkResult {
    pub positions: Vec<Vec3>,
    pub orientations: Vec<Quat>,
    /// Set when the frame carried a cached `body_pos` that disagrees with the
    /// recomputation by more than [`FK_CACHE_TOLERANCE`] in any component.
    pub cache_stale: bool,
}

/// Forward kinematics of a single frame against a skeleton.
///
/// Each body's pose composes the parent pose with the fixed offset and, when
/// the body carries a joint, a rotation about its axis by the mapped joint
/// angle.
pub fn fk_frame(frame: &Frame, skel: &SkeletonSpec) -> Result<FkResult> {
    if frame.joint_pos.len() != skel.dof_count() {
        return Err(MotionError::DofMismatch {
            expected: skel.dof_count(),
            actual: frame.joint_pos.len(),
        });
    }
    let n = skel.body_count();
    let mut positions = Vec::with_capacity(n);
    let mut orientations = Vec::with_capacity(n);
    for (i, body) in skel.bodies.iter().enumerate() {
        match body.parent {
            None => {
                positions.push(frame.root_pos);
                orientations.push(frame.root_quat);
            }
            Some(p) => {
                let parent_pos = positions[p];
                let parent_rot = orientations[p];
                let pos = parent_pos + parent_rot.rotate(body.offset);
                let rot = match body.joint_axis {
                    Some(axis) => {
                        let dof = skel
                            .dof_of_body(i)
                            .ok_or_else(|| MotionError::InvalidSkeleton(format!(
                                "body {i} has a joint axis but no dof_map entry"
                            )))?;
                        parent_rot * Quat::from_axis_angle(axis, frame.joint_pos[dof])
                    }
                    None => parent_rot,
                };
                positions.push(pos);
                orientations.push(rot);
            }
        }
    }
    let cache_stale = match &frame.body_pos {
        Some(cached) if cached.len() == n => cached
            .iter()
            .zip(&positions)
            .any(|(c, p)| {
                (c.x - p.x).abs() > FK_CACHE_TOLERANCE
                    || (c.y - p.y).abs() > FK_CACHE_TOLERANCE
                    || (c.z - p.z).abs() > FK_CACHE_TOLERANCE
            }),
        Some(_) => true,
        None => false,
    };
    Ok(FkResult { positions, orientations, cache_stale })
}

/// Forward kinematics for `frame_index` of a sequence.
pub fn forward_kinematics(
    seq: &PoseSequence,
    skel: &SkeletonSpec,
    frame_index: usize,
) -> Result<FkResult> {
    fk_frame(seq.frame(frame_index)?, skel)
}

/// Minimum ground clearance over all bodies of a single frame:
/// `min_i (z_i + z_offset_i)`.
pub fn min_body_height_frame(frame: &Frame, skel: &SkeletonSpec) -> Result<f64> {
    let fk = fk_frame(frame, skel)?;
    Ok(fk
        .positions
        .iter()
        .zip(&skel.bodies)
        .map(|(p, b)| p.z + b.z_offset)
        .fold(f64::INFINITY, f64::min))
}

/// Minimum body height of `frame_index` of a sequence.
pub fn min_body_height(seq: &PoseSequence, skel: &SkeletonSpec, frame_index: usize) -> Result<f64> {
    min_body_height_frame(seq.frame(frame_index)?, skel)
}

/// Per-frame forward-difference velocities.
///
/// Entry `t` holds the difference between frames `t+1` and `t`; the last
/// entry copies the second-to-last. Angular velocity is the rotation vector
/// of `q_{t+1} * conj(q_t)`. With `per_second` the differences are scaled by
/// fps, otherwise they are raw per-frame deltas.
#[derive(Debug, Clone)]
pub struct FrameVelocities {
    pub joint_vel: Vec<Vec<f64>>,
    pub root_lin_vel: Vec<Vec3>,
    pub root_ang_vel: Vec<Vec3>,
}

pub fn finite_difference_velocities(seq: &PoseSequence, per_second: bool) -> Result<FrameVelocities> {
    let n = seq.len();
    if n < 2 {
        return Err(MotionError::TooFewFrames { needed: 2, actual: n });
    }
    let scale = if per_second { seq.fps } else { 1.0 };
    let mut joint_vel: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut root_lin_vel = Vec::with_capacity(n);
    let mut root_ang_vel = Vec::with_capacity(n);
    for t in 0..n - 1 {
        let a = &seq.frames[t];
        let b = &seq.frames[t + 1];
        joint_vel.push(
            b.joint_pos
                .iter()
                .zip(&a.joint_pos)
                .map(|(nb, na)| (nb - na) * scale)
                .collect(),
        );
        root_lin_vel.push((b.root_pos - a.root_pos) * scale);
        root_ang_vel.push(rotation_between(b.root_quat, a.root_quat) * scale);
    }
    joint_vel.push(joint_vel[n - 2].clone());
    root_lin_vel.push(root_lin_vel[n - 2]);
    root_ang_vel.push(root_ang_vel[n - 2]);
    Ok(FrameVelocities { joint_vel, root_lin_vel, root_ang_vel })
}

//! Fall-pose augmentation by recombining rotational components across a
//! pose pool.
//!
//! Given a pool of fallen configurations, each augmented pose draws its root
//! orientation from one uniformly random pool entry and its joint
//! configuration from another (independently, so the pair may coincide with
//! probability 1/N). Recombination generally breaks ground contact, so the
//! root is re-grounded: x and y are zeroed and z is set so the lowest body
//! touches the ground exactly.

use crate::error::{MotionError, Result};
use crate::kinematics::min_body_height_frame;
use crate::math::{Quat, Vec3};
use crate::sequence::{Frame, PoseSequence};
use crate::skeleton::SkeletonSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// One pool entry: a single pose with provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoolPose {
    pub root_pos: Vec3,
    pub root_quat: Quat,
    pub joint_pos: Vec<f64>,
    pub source_tag: String,
}

/// Pool of candidate fall poses.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosePool {
    pub poses: Vec<PoolPose>,
    pub rng_seed: u64,
}

impl PosePool {
    /// Build a pool from the frames of a sequence, tagging each pose with
    /// `tag_prefix#index`.
    pub fn from_sequence(seq: &PoseSequence, tag_prefix: &str, rng_seed: u64) -> Self {
        let poses = seq
            .frames
            .iter()
            .enumerate()
            .map(|(i, f)| PoolPose {
                root_pos: f.root_pos,
                root_quat: f.root_quat,
                joint_pos: f.joint_pos.clone(),
                source_tag: format!("{tag_prefix}#{i}"),
            })
            .collect();
        Self { poses, rng_seed }
    }

    pub fn validate(&self, skel: &SkeletonSpec) -> Result<()> {
        if self.poses.is_empty() {
            return Err(MotionError::InvalidConfig("pose pool is empty".into()));
        }
        let dof = skel.dof_count();
        for (i, pose) in self.poses.iter().enumerate() {
            if pose.joint_pos.len() != dof {
                return Err(MotionError::DofMismatch { expected: dof, actual: pose.joint_pos.len() });
            }
            if !pose.root_quat.is_unit(1e-6) {
                return Err(MotionError::NonUnitQuaternion { norm: pose.root_quat.norm(), tol: 1e-6 });
            }
            if !pose.root_pos.is_finite() || pose.joint_pos.iter().any(|v| !v.is_finite()) {
                return Err(MotionError::InvalidSequence(format!(
                    "pool pose {i} contains non-finite values"
                )));
            }
        }
        Ok(())
    }
}

/// Generate `count` recombined poses from a pool of at least two.
///
/// Joint angles are clamped into the skeleton limits (clamping is logged).
/// Every output pose is re-grounded so its minimum body height is exactly
/// zero and keeps a unit root quaternion. Deterministic under the pool's
/// seed.
pub fn recombine(pool: &PosePool, count: usize, skel: &SkeletonSpec) -> Result<Vec<PoolPose>> {
    skel.validate()?;
    pool.validate(skel)?;
    if pool.poses.len() < 2 {
        return Err(MotionError::InvalidConfig(
            "pose pool needs at least two poses to recombine".into(),
        ));
    }
    let n = pool.poses.len();
    let mut rng = ChaCha8Rng::seed_from_u64(pool.rng_seed);
    let mut out = Vec::with_capacity(count);
    let mut clamped = 0usize;
    for _ in 0..count {
        let ri = rng.random_range(0..n);
        let ji = rng.random_range(0..n);
        let root_quat = pool.poses[ri].root_quat;
        let mut joint_pos = pool.poses[ji].joint_pos.clone();
        for (j, p) in joint_pos.iter_mut().enumerate() {
            let (lo, hi) = skel.joint_limits[j];
            let c = p.clamp(lo, hi);
            if c != *p {
                clamped += 1;
                *p = c;
            }
        }
        // Ground the pose: measure the minimum body height with the root at
        // the origin, then lower the root by exactly that amount.
        let probe = Frame::new(Vec3::ZERO, root_quat, joint_pos.clone());
        let zmin = min_body_height_frame(&probe, skel)?;
        out.push(PoolPose {
            root_pos: Vec3::new(0.0, 0.0, -zmin),
            root_quat,
            joint_pos,
            source_tag: format!(
                "r:{}|theta:{}",
                pool.poses[ri].source_tag, pool.poses[ji].source_tag
            ),
        });
    }
    if clamped > 0 {
        log::warn!("recombination clamped {clamped} joint values into skeleton limits");
    }
    Ok(out)
}

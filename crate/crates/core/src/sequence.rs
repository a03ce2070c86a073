//! Pose sequences: the central artifact flowing through every pipeline stage.

use crate::error::{MotionError, Result};
use crate::math::{Quat, Vec3};
use crate::skeleton::SkeletonSpec;
use serde::{Deserialize, Serialize};

/// Tolerance on root quaternion unit norm accepted by validation.
pub const QUAT_UNIT_TOLERANCE: f64 = 1e-6;

/// One sample of a pose sequence.
///
/// `body_pos` and `joint_vel` are advisory caches; forward kinematics and
/// finite differences are the source of truth. `contact_force` holds one
/// vertical force per body in the skeleton's `feet` set, in that set's order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Frame {
    /// Root position in the world frame, meters.
    pub root_pos: Vec3,
    /// Root orientation, unit quaternion in (w, x, y, z) order.
    pub root_quat: Quat,
    /// Joint angles, radians, one per skeleton dof.
    pub joint_pos: Vec<f64>,
    /// Optional joint velocities, rad/s.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint_vel: Option<Vec<f64>>,
    /// Optional cached world-frame body positions from forward kinematics.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body_pos: Option<Vec<Vec3>>,
    /// Optional per-foot vertical contact force, Newtons.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contact_force: Option<Vec<f64>>,
}

impl Frame {
    pub fn new(root_pos: Vec3, root_quat: Quat, joint_pos: Vec<f64>) -> Self {
        Self { root_pos, root_quat, joint_pos, joint_vel: None, body_pos: None, contact_force: None }
    }
}

/// Time-indexed sequence of frames tied to a skeleton by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseSequence {
    /// Sampling rate, Hz.
    pub fps: f64,
    /// Name of the skeleton these frames are expressed against.
    pub skeleton_id: String,
    pub frames: Vec<Frame>,
}

impl PoseSequence {
    pub fn new(fps: f64, skeleton_id: impl Into<String>, frames: Vec<Frame>) -> Self {
        Self { fps, skeleton_id: skeleton_id.into(), frames }
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frame(&self, index: usize) -> Result<&Frame> {
        self.frames
            .get(index)
            .ok_or(MotionError::FrameIndexOutOfRange { index, len: self.frames.len() })
    }

    /// Root height trajectory P(t), the vertical component of the root.
    pub fn root_heights(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.root_pos.z).collect()
    }

    /// Check structural consistency against a skeleton.
    pub fn validate(&self, skel: &SkeletonSpec) -> Result<()> {
        if self.frames.is_empty() {
            return Err(MotionError::InvalidSequence("no frames".into()));
        }
        if !self.fps.is_finite() || self.fps <= 0.0 {
            return Err(MotionError::InvalidSequence(format!("fps must be positive, got {}", self.fps)));
        }
        if self.skeleton_id != skel.name {
            return Err(MotionError::InvalidSequence(format!(
                "sequence references skeleton '{}', got '{}'",
                self.skeleton_id, skel.name
            )));
        }
        let dof = skel.dof_count();
        let bodies = skel.body_count();
        let feet = skel.body_set(crate::skeleton::body_sets::FEET).len();
        for (t, frame) in self.frames.iter().enumerate() {
            if frame.joint_pos.len() != dof {
                return Err(MotionError::DofMismatch { expected: dof, actual: frame.joint_pos.len() });
            }
            if !frame.root_pos.is_finite()
                || !frame.root_quat.is_finite()
                || frame.joint_pos.iter().any(|v| !v.is_finite())
            {
                return Err(MotionError::InvalidSequence(format!("frame {t} contains non-finite values")));
            }
            if !frame.root_quat.is_unit(QUAT_UNIT_TOLERANCE) {
                return Err(MotionError::NonUnitQuaternion {
                    norm: frame.root_quat.norm(),
                    tol: QUAT_UNIT_TOLERANCE,
                });
            }
            if let Some(jv) = &frame.joint_vel {
                if jv.len() != dof {
                    return Err(MotionError::DofMismatch { expected: dof, actual: jv.len() });
                }
            }
            if let Some(bp) = &frame.body_pos {
                if bp.len() != bodies {
                    return Err(MotionError::InvalidSequence(format!(
                        "frame {t} caches {} body positions, skeleton has {bodies} bodies",
                        bp.len()
                    )));
                }
            }
            if let Some(cf) = &frame.contact_force {
                if feet > 0 && cf.len() != feet {
                    return Err(MotionError::InvalidSequence(format!(
                        "frame {t} has {} contact forces, skeleton has {feet} feet",
                        cf.len()
                    )));
                }
            }
        }
        Ok(())
    }
}

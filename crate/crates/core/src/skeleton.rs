//! Articulated skeleton description.
//!
//! A skeleton is a topologically sorted tree of point bodies. Each body hangs
//! off its parent through a fixed translational offset and, optionally, a
//! single revolute joint about a fixed axis. Multi-dof joints are modeled as
//! chains of bodies with zero offsets. There is no collision geometry: ground
//! clearance checks use the body origin plus an optional per-body `z_offset`
//! (e.g. a negative offset to approximate the sole below an ankle body).

use crate::error::{MotionError, Result};
use crate::math::Vec3;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Well-known body set names used by the reward and termination modules.
pub mod body_sets {
    pub const FEET: &str = "feet";
    pub const SHOULDERS: &str = "shoulders";
    pub const KNEES: &str = "knees";
    pub const ANKLES: &str = "ankles";
    pub const UNDESIRED_CONTACT: &str = "undesired_contact_bodies";
}

fn default_mass() -> f64 {
    1.0
}

/// One rigid body of the skeleton tree.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Body {
    pub name: String,
    /// Parent body index; `None` only for the root (body 0).
    pub parent: Option<usize>,
    /// Fixed translation from the parent frame to this body's joint, meters.
    pub offset: Vec3,
    /// Revolute joint axis in the parent frame; `None` for a fixed attachment.
    pub joint_axis: Option<Vec3>,
    /// Height adjustment applied in ground-clearance computations, meters.
    #[serde(default)]
    pub z_offset: f64,
    /// Mass used for the center-of-mass approximation, kilograms.
    #[serde(default = "default_mass")]
    pub mass: f64,
}

/// Skeleton specification: bodies, dof layout, named body subsets and joint
/// limits.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkeletonSpec {
    pub name: String,
    pub bodies: Vec<Body>,
    /// Maps each dof index to the body actuated by that joint angle.
    pub dof_map: Vec<usize>,
    /// Named body subsets (`feet`, `shoulders`, `knees`, `ankles`,
    /// `undesired_contact_bodies`, ...).
    #[serde(default)]
    pub body_sets: BTreeMap<String, Vec<usize>>,
    /// Per-dof `(lower, upper)` bounds, radians.
    pub joint_limits: Vec<(f64, f64)>,
}

impl SkeletonSpec {
    pub fn body_count(&self) -> usize {
        self.bodies.len()
    }

    pub fn dof_count(&self) -> usize {
        self.dof_map.len()
    }

    /// Dof index actuating `body`, if any.
    pub fn dof_of_body(&self, body: usize) -> Option<usize> {
        self.dof_map.iter().position(|&b| b == body)
    }

    /// Named body subset; absent names resolve to the empty set.
    pub fn body_set(&self, name: &str) -> &[usize] {
        self.body_sets.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn validate(&self) -> Result<()> {
        if self.bodies.is_empty() {
            return Err(MotionError::InvalidSkeleton("no bodies".into()));
        }
        for (i, body) in self.bodies.iter().enumerate() {
            match body.parent {
                None => {
                    if i != 0 {
                        return Err(MotionError::InvalidSkeleton(format!(
                            "body {i} ({}) has no parent but is not body 0",
                            body.name
                        )));
                    }
                }
                Some(p) => {
                    if i == 0 {
                        return Err(MotionError::InvalidSkeleton(
                            "root body must have no parent".into(),
                        ));
                    }
                    if p >= i {
                        return Err(MotionError::InvalidSkeleton(format!(
                            "body {i} ({}) has parent {p}, bodies must be topologically sorted",
                            body.name
                        )));
                    }
                }
            }
            if !body.offset.is_finite() {
                return Err(MotionError::InvalidSkeleton(format!(
                    "body {i} ({}) has non-finite offset",
                    body.name
                )));
            }
            if let Some(axis) = body.joint_axis {
                if (axis.norm() - 1.0).abs() > 1e-6 {
                    return Err(MotionError::InvalidSkeleton(format!(
                        "body {i} ({}) joint axis is not unit length",
                        body.name
                    )));
                }
            }
            if body.mass.is_nan() || body.mass <= 0.0 {
                return Err(MotionError::InvalidSkeleton(format!(
                    "body {i} ({}) mass must be positive",
                    body.name
                )));
            }
        }
        for (dof, &body) in self.dof_map.iter().enumerate() {
            if body >= self.bodies.len() {
                return Err(MotionError::InvalidSkeleton(format!(
                    "dof {dof} maps to body {body}, only {} bodies exist",
                    self.bodies.len()
                )));
            }
            if self.bodies[body].joint_axis.is_none() {
                return Err(MotionError::InvalidSkeleton(format!(
                    "dof {dof} maps to body {body} which has no joint axis"
                )));
            }
        }
        for (dof, &body) in self.dof_map.iter().enumerate() {
            if self.dof_map[..dof].contains(&body) {
                return Err(MotionError::InvalidSkeleton(format!(
                    "body {body} appears more than once in dof_map"
                )));
            }
        }
        let jointed = self.bodies.iter().filter(|b| b.joint_axis.is_some()).count();
        if jointed != self.dof_map.len() {
            return Err(MotionError::InvalidSkeleton(format!(
                "{jointed} bodies carry joints but dof_map has {} entries",
                self.dof_map.len()
            )));
        }
        if self.joint_limits.len() != self.dof_map.len() {
            return Err(MotionError::InvalidSkeleton(format!(
                "{} joint limits for {} dofs",
                self.joint_limits.len(),
                self.dof_map.len()
            )));
        }
        for (dof, &(lo, hi)) in self.joint_limits.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return Err(MotionError::InvalidSkeleton(format!(
                    "dof {dof} has limits ({lo}, {hi}) with lower > upper"
                )));
            }
        }
        for (name, set) in &self.body_sets {
            for &b in set {
                if b >= self.bodies.len() {
                    return Err(MotionError::InvalidSkeleton(format!(
                        "body set '{name}' references body {b}, only {} bodies exist",
                        self.bodies.len()
                    )));
                }
            }
        }
        Ok(())
    }
}

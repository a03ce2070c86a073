//! Bad-tracking indicators and the consecutive-bad-step termination state
//! machine.
//!
//! Three deviation checks (root position, projected-gravity orientation,
//! any-body position) OR together into a per-step bad flag. In normal
//! tracking a single bad step terminates; during recovery a grace counter
//! allows up to a configured run of consecutive bad steps before
//! terminating, so a robot standing up is not killed for being far from the
//! reference.

use crate::error::{MotionError, Result};
use crate::math::Vec3;
use crate::rewards::TrackingPair;
use serde::{Deserialize, Serialize};

/// Projected-gravity z-difference equivalent to tilting an initially
/// upright frame by `angle_rad`.
pub fn projected_gravity_threshold_for_tilt(angle_rad: f64) -> f64 {
    1.0 - angle_rad.cos()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TerminationConfig {
    /// Root position deviation threshold, meters.
    pub position_threshold: f64,
    /// Projected-gravity z-difference threshold (unitless). The default is
    /// the value corresponding to a 0.8 rad tilt of an upright frame.
    pub orientation_threshold: f64,
    /// Per-body position deviation threshold, meters.
    pub body_threshold: f64,
    /// Maximum allowed consecutive bad steps while recovering.
    pub max_consecutive_bad: u64,
}

impl Default for TerminationConfig {
    fn default() -> Self {
        Self {
            position_threshold: 0.5,
            orientation_threshold: projected_gravity_threshold_for_tilt(0.8),
            body_threshold: 0.5,
            max_consecutive_bad: 50,
        }
    }
}

impl TerminationConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("position_threshold", self.position_threshold),
            ("orientation_threshold", self.orientation_threshold),
            ("body_threshold", self.body_threshold),
        ] {
            if v.is_nan() || v <= 0.0 {
                return Err(MotionError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_consecutive_bad == 0 {
            return Err(MotionError::InvalidConfig("max_consecutive_bad must be positive".into()));
        }
        Ok(())
    }
}

/// Per-condition bad-tracking flags for one step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadTrackingFlags {
    pub position: bool,
    pub orientation: bool,
    pub body: bool,
}

impl BadTrackingFlags {
    /// Logical disjunction of all conditions.
    pub fn any(self) -> bool {
        self.position || self.orientation || self.body
    }
}

/// Evaluate the three deviation conditions for one robot/reference pair.
pub fn eval_bad_tracking(pair: &TrackingPair, cfg: &TerminationConfig) -> BadTrackingFlags {
    let gravity = Vec3::new(0.0, 0.0, -1.0);
    let root_dist =
        (pair.reference_bodies.positions[0] - pair.robot_bodies.positions[0]).norm();

    // Projected gravity: world gravity expressed in each root frame.
    let proj_ref = pair.reference_bodies.orientations[0].conjugate().rotate(gravity);
    let proj_rob = pair.robot_bodies.orientations[0].conjugate().rotate(gravity);
    let ori_dev = (proj_ref.z - proj_rob.z).abs();

    let body = pair
        .reference_bodies
        .positions
        .iter()
        .zip(&pair.robot_bodies.positions)
        .any(|(a, b)| (*a - *b).norm() > cfg.body_threshold);

    BadTrackingFlags {
        position: root_dist > cfg.position_threshold,
        orientation: ori_dev > cfg.orientation_threshold,
        body,
    }
}

/// Running termination state of one episode.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct TerminationState {
    /// Length of the current trailing run of bad steps.
    pub consecutive_bad: u64,
    pub last_flags: BadTrackingFlags,
    pub terminated: bool,
}

impl TerminationState {
    pub fn new() -> Self {
        Self::default()
    }
}

/// Advance the termination state by one step.
///
/// The counter follows `L(k) = L(k-1) + 1` on a bad step and resets to zero
/// otherwise. While recovering, termination requires the counter to reach
/// the configured maximum; otherwise any bad step terminates immediately.
/// Stepping an already-terminated state is rejected.
pub fn step_termination(
    state: &TerminationState,
    flags: BadTrackingFlags,
    recovering: bool,
    cfg: &TerminationConfig,
) -> Result<TerminationState> {
    if state.terminated {
        return Err(MotionError::AlreadyTerminated);
    }
    let bad = flags.any();
    let consecutive_bad = if bad { state.consecutive_bad + 1 } else { 0 };
    let terminated =
        if recovering { consecutive_bad >= cfg.max_consecutive_bad } else { bad };
    Ok(TerminationState { consecutive_bad, last_flags: flags, terminated })
}

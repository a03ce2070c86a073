//! Frame-wise tracking and recovery reward evaluation.
//!
//! Tracking terms compare a robot frame against a reference frame: body
//! positions and orientations expressed relative to the root, global body
//! angular velocities, center-of-mass placement over the support foot,
//! plus stability penalties (close feet, feet slip, root orientation, knee
//! and ankle action rates, soft joint limits, undesired contacts). Recovery
//! terms shape in-place, smooth standing up when the shoulders are far from
//! the reference height.
//!
//! Every term reports its raw value and its weighted contribution; terms
//! whose inputs are unavailable (e.g. contact forces absent) are excluded
//! from the total with a warning rather than silently zeroed.

use crate::error::{MotionError, Result};
use crate::kinematics::fk_frame;
use crate::math::{Quat, Vec3};
use crate::sequence::{Frame, PoseSequence};
use crate::skeleton::{body_sets, SkeletonSpec};
use serde::{Deserialize, Serialize};

/// Per-term weights. Defaults follow the tracking/recovery table values.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardWeights {
    pub body_position: f64,
    pub body_orientation: f64,
    pub body_angular_velocity: f64,
    pub center_of_mass: f64,
    pub close_feet: f64,
    pub feet_slip: f64,
    pub root_orientation: f64,
    pub action_rate_knee: f64,
    pub action_rate_ankle: f64,
    pub dof_position_limits: f64,
    pub undesired_contacts: f64,
    pub recovery_shoulder_height: f64,
    pub recovery_xy_root_movement: f64,
    pub recovery_action_rate: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        Self {
            body_position: 4.0,
            body_orientation: 2.0,
            body_angular_velocity: 1.0,
            center_of_mass: 2.0,
            close_feet: -1000.0,
            feet_slip: -2.0,
            root_orientation: -1.0,
            action_rate_knee: -3.0,
            action_rate_ankle: -20.0,
            dof_position_limits: -100.0,
            undesired_contacts: -0.5,
            recovery_shoulder_height: -2.0,
            recovery_xy_root_movement: -1.0,
            recovery_action_rate: -2.0,
        }
    }
}

/// Kernel scales and thresholds for reward evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardConfig {
    pub weights: RewardWeights,
    /// Exp-kernel scale of the body position term, m^2.
    pub sigma_sq_pos: f64,
    /// Exp-kernel scale of the body orientation term, rad^2.
    pub sigma_sq_ori: f64,
    /// Exp-kernel scale of the body angular velocity term, (rad/s)^2.
    pub sigma_sq_ang_vel: f64,
    /// Exp-kernel scale of the center-of-mass term, m (divides a norm).
    pub sigma_sq_com: f64,
    /// Feet closer than this distance are penalized, meters.
    pub close_feet_threshold: f64,
    /// Vertical contact force above which a foot counts as loaded, Newtons.
    pub feet_slip_contact_threshold: f64,
    /// Shoulder-height deviation that activates recovery mode, meters.
    pub recovery_shoulder_threshold: f64,
    /// Shoulder-height deviation gating the recovery penalties, meters.
    pub recovery_gate_epsilon: f64,
    /// Contact force above which an undesired body counts as touching.
    pub contact_force_threshold: f64,
    /// Reference foot height below which that foot counts as supporting.
    pub single_support_foot_height: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            weights: RewardWeights::default(),
            sigma_sq_pos: 0.09,
            sigma_sq_ori: 0.25,
            sigma_sq_ang_vel: 0.25,
            sigma_sq_com: 0.04,
            close_feet_threshold: 0.16,
            feet_slip_contact_threshold: 8.0,
            recovery_shoulder_threshold: 1.0,
            recovery_gate_epsilon: 1.0,
            contact_force_threshold: 1.0,
            single_support_foot_height: 0.02,
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sigma_sq_pos", self.sigma_sq_pos),
            ("sigma_sq_ori", self.sigma_sq_ori),
            ("sigma_sq_ang_vel", self.sigma_sq_ang_vel),
            ("sigma_sq_com", self.sigma_sq_com),
        ] {
            if v.is_nan() || v <= 0.0 {
                return Err(MotionError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("close_feet_threshold", self.close_feet_threshold),
            ("feet_slip_contact_threshold", self.feet_slip_contact_threshold),
            ("recovery_shoulder_threshold", self.recovery_shoulder_threshold),
            ("recovery_gate_epsilon", self.recovery_gate_epsilon),
            ("contact_force_threshold", self.contact_force_threshold),
            ("single_support_foot_height", self.single_support_foot_height),
        ] {
            if v < 0.0 {
                return Err(MotionError::InvalidConfig(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Derived world-frame body kinematics of one frame.
#[derive(Debug, Clone)]
pub struct BodyKinematics {
    pub positions: Vec<Vec3>,
    pub orientations: Vec<Quat>,
    /// Per-body linear velocities, m/s.
    pub linear_velocities: Vec<Vec3>,
    /// Per-body angular velocities (rotation-vector rate), rad/s.
    pub angular_velocities: Vec<Vec3>,
}

impl BodyKinematics {
    /// Run forward kinematics at `frame_index` and derive per-body
    /// velocities by forward difference against the next frame (the last
    /// frame reuses the preceding difference), scaled to per-second.
    pub fn derive(seq: &PoseSequence, skel: &SkeletonSpec, frame_index: usize) -> Result<Self> {
        let n = seq.len();
        if frame_index >= n {
            return Err(MotionError::FrameIndexOutOfRange { index: frame_index, len: n });
        }
        let here = fk_frame(&seq.frames[frame_index], skel)?;
        if n == 1 {
            let zeros = vec![Vec3::ZERO; skel.body_count()];
            return Ok(Self {
                positions: here.positions,
                orientations: here.orientations,
                linear_velocities: zeros.clone(),
                angular_velocities: zeros,
            });
        }
        let (a, b) = if frame_index + 1 < n { (frame_index, frame_index + 1) } else { (n - 2, n - 1) };
        let fk_a = fk_frame(&seq.frames[a], skel)?;
        let fk_b = fk_frame(&seq.frames[b], skel)?;
        let fps = seq.fps;
        let linear_velocities = fk_b
            .positions
            .iter()
            .zip(&fk_a.positions)
            .map(|(pb, pa)| (*pb - *pa) * fps)
            .collect();
        let angular_velocities = fk_b
            .orientations
            .iter()
            .zip(&fk_a.orientations)
            .map(|(qb, qa)| crate::math::rotation_between(*qb, *qa) * fps)
            .collect();
        Ok(Self {
            positions: here.positions,
            orientations: here.orientations,
            linear_velocities,
            angular_velocities,
        })
    }

    pub fn body_count(&self) -> usize {
        self.positions.len()
    }
}

/// One robot/reference frame pair with everything reward evaluation needs.
#[derive(Debug, Clone)]
pub struct TrackingPair {
    pub robot_frame: Frame,
    pub robot_bodies: BodyKinematics,
    pub reference_frame: Frame,
    pub reference_bodies: BodyKinematics,
    /// Joint-space action of this step.
    pub action: Vec<f64>,
    /// Joint-space action of the previous step.
    pub previous_action: Vec<f64>,
    /// Robot center-of-mass xy at the previous step; required by the
    /// recovery terms.
    pub previous_com_xy: Option<[f64; 2]>,
    /// Vertical contact force per body of the `undesired_contact_bodies`
    /// set, in set order. `None` flags the undesired-contact term
    /// unavailable.
    pub undesired_contact_forces: Option<Vec<f64>>,
}

impl TrackingPair {
    /// Build the pair for `frame_index` from frame-aligned robot and
    /// reference sequences. Actions are taken as the robot joint targets,
    /// with frame 0 reusing itself as the previous step.
    pub fn from_sequences(
        robot: &PoseSequence,
        reference: &PoseSequence,
        skel: &SkeletonSpec,
        frame_index: usize,
    ) -> Result<Self> {
        if robot.len() != reference.len() {
            return Err(MotionError::InvalidSequence(format!(
                "robot has {} frames, reference has {}",
                robot.len(),
                reference.len()
            )));
        }
        let robot_bodies = BodyKinematics::derive(robot, skel, frame_index)?;
        let reference_bodies = BodyKinematics::derive(reference, skel, frame_index)?;
        let prev = frame_index.saturating_sub(1);
        let prev_bodies = if prev == frame_index {
            robot_bodies.clone()
        } else {
            BodyKinematics::derive(robot, skel, prev)?
        };
        let previous_com_xy = Some(center_of_mass_xy(&prev_bodies, skel));
        Ok(Self {
            robot_frame: robot.frames[frame_index].clone(),
            robot_bodies,
            reference_frame: reference.frames[frame_index].clone(),
            reference_bodies,
            action: robot.frames[frame_index].joint_pos.clone(),
            previous_action: robot.frames[prev].joint_pos.clone(),
            previous_com_xy,
            undesired_contact_forces: None,
        })
    }

    fn check(&self, skel: &SkeletonSpec) -> Result<()> {
        let n = skel.body_count();
        if self.robot_bodies.body_count() != n || self.reference_bodies.body_count() != n {
            return Err(MotionError::InvalidSequence(format!(
                "body count mismatch: skeleton has {n}, robot {} and reference {}",
                self.robot_bodies.body_count(),
                self.reference_bodies.body_count()
            )));
        }
        let dof = skel.dof_count();
        if self.action.len() != dof || self.previous_action.len() != dof {
            return Err(MotionError::DofMismatch {
                expected: dof,
                actual: self.action.len().min(self.previous_action.len()),
            });
        }
        Ok(())
    }
}

/// One evaluated reward term.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermValue {
    pub name: String,
    /// Raw term value; `None` when the term's inputs were unavailable.
    pub raw: Option<f64>,
    pub weight: f64,
    /// `raw * weight`, `None` when unavailable.
    pub weighted: Option<f64>,
}

/// Per-frame reward evaluation report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RewardReport {
    pub terms: Vec<TermValue>,
    /// Sum of available weighted terms.
    pub total: f64,
    pub recovery_active: bool,
}

impl RewardReport {
    pub fn term(&self, name: &str) -> Option<&TermValue> {
        self.terms.iter().find(|t| t.name == name)
    }

    fn push(&mut self, name: &str, raw: Option<f64>, weight: f64) {
        let weighted = raw.map(|r| r * weight);
        if let Some(w) = weighted {
            self.total += w;
        }
        self.terms.push(TermValue { name: name.into(), raw, weight, weighted });
    }
}

/// Rotation error between two unit quaternions as a shortest-path rotation
/// vector (radians). Errors when either input departs from unit norm by
/// more than 1e-4.
pub fn quat_error(q1: Quat, q2: Quat) -> Result<Vec3> {
    const TOL: f64 = 1e-4;
    for q in [q1, q2] {
        if !q.is_unit(TOL) {
            return Err(MotionError::NonUnitQuaternion { norm: q.norm(), tol: TOL });
        }
    }
    Ok(crate::math::rotation_between(q1, q2))
}

/// Mass-weighted mean body position, xy components.
pub fn center_of_mass_xy(bodies: &BodyKinematics, skel: &SkeletonSpec) -> [f64; 2] {
    let mut wx = 0.0;
    let mut wy = 0.0;
    let mut total = 0.0;
    for (p, b) in bodies.positions.iter().zip(&skel.bodies) {
        wx += p.x * b.mass;
        wy += p.y * b.mass;
        total += b.mass;
    }
    [wx / total, wy / total]
}

fn root_relative_positions(bodies: &BodyKinematics) -> Vec<Vec3> {
    let inv = bodies.orientations[0].conjugate();
    let root = bodies.positions[0];
    bodies.positions.iter().map(|p| inv.rotate(*p - root)).collect()
}

fn root_relative_orientations(bodies: &BodyKinematics) -> Vec<Quat> {
    let inv = bodies.orientations[0].conjugate();
    bodies.orientations.iter().map(|q| inv * *q).collect()
}

/// Effective foot height used in support checks (body z plus its z offset).
fn foot_height(bodies: &BodyKinematics, skel: &SkeletonSpec, body: usize) -> f64 {
    bodies.positions[body].z + skel.bodies[body].z_offset
}

/// Mean shoulder world height of one side, or an error when the skeleton
/// defines no shoulders.
fn mean_shoulder_height(bodies: &BodyKinematics, skel: &SkeletonSpec) -> Result<f64> {
    let shoulders = skel.body_set(body_sets::SHOULDERS);
    if shoulders.is_empty() {
        return Err(MotionError::InvalidSkeleton("skeleton defines no shoulder bodies".into()));
    }
    Ok(shoulders.iter().map(|&b| bodies.positions[b].z).sum::<f64>() / shoulders.len() as f64)
}

/// Recovery indicator: shoulder height of robot and reference differ by
/// strictly more than the configured threshold.
pub fn recovery_indicator(
    pair: &TrackingPair,
    skel: &SkeletonSpec,
    cfg: &RewardConfig,
) -> Result<bool> {
    let h_ref = mean_shoulder_height(&pair.reference_bodies, skel)?;
    let h_robot = mean_shoulder_height(&pair.robot_bodies, skel)?;
    Ok((h_ref - h_robot).abs() > cfg.recovery_shoulder_threshold)
}

fn action_rate(pair: &TrackingPair, dofs: &[usize]) -> f64 {
    dofs.iter()
        .map(|&j| {
            let d = pair.action[j] - pair.previous_action[j];
            d * d
        })
        .sum()
}

/// Dof indices actuating the bodies of a named set; bodies without a joint
/// are skipped.
fn set_dofs(skel: &SkeletonSpec, set: &str) -> Vec<usize> {
    skel.body_set(set).iter().filter_map(|&b| skel.dof_of_body(b)).collect()
}

/// Evaluate every tracking reward term for one pair.
pub fn eval_tracking_rewards(
    pair: &TrackingPair,
    skel: &SkeletonSpec,
    cfg: &RewardConfig,
) -> Result<RewardReport> {
    cfg.validate()?;
    pair.check(skel)?;
    let w = &cfg.weights;
    let b_count = skel.body_count() as f64;
    let mut report = RewardReport { terms: Vec::new(), total: 0.0, recovery_active: false };

    // Body position tracking: mean squared root-relative position error.
    let rel_ref = root_relative_positions(&pair.reference_bodies);
    let rel_rob = root_relative_positions(&pair.robot_bodies);
    let pos_err: f64 =
        rel_ref.iter().zip(&rel_rob).map(|(a, b)| (*a - *b).norm_squared()).sum::<f64>() / b_count;
    report.push("body_position", Some((-pos_err / cfg.sigma_sq_pos).exp()), w.body_position);

    // Body orientation tracking: mean squared root-relative rotation error.
    let relq_ref = root_relative_orientations(&pair.reference_bodies);
    let relq_rob = root_relative_orientations(&pair.robot_bodies);
    let mut ori_err = 0.0;
    for (qr, qb) in relq_ref.iter().zip(&relq_rob) {
        ori_err += quat_error(*qr, *qb)?.norm_squared();
    }
    ori_err /= b_count;
    report.push("body_orientation", Some((-ori_err / cfg.sigma_sq_ori).exp()), w.body_orientation);

    // Global body angular velocity tracking.
    let ang_err: f64 = pair
        .reference_bodies
        .angular_velocities
        .iter()
        .zip(&pair.robot_bodies.angular_velocities)
        .map(|(a, b)| (*a - *b).norm_squared())
        .sum::<f64>()
        / b_count;
    report.push(
        "body_angular_velocity",
        Some((-ang_err / cfg.sigma_sq_ang_vel).exp()),
        w.body_angular_velocity,
    );

    // Center of mass over the lowest foot, gated by single support in the
    // reference.
    let feet = skel.body_set(body_sets::FEET);
    if feet.len() != 2 {
        return Err(MotionError::InvalidSkeleton(format!(
            "reward evaluation needs a 'feet' body set of exactly 2 bodies, got {}",
            feet.len()
        )));
    }
    let com = center_of_mass_xy(&pair.robot_bodies, skel);
    let lowest_foot = if foot_height(&pair.robot_bodies, skel, feet[0])
        <= foot_height(&pair.robot_bodies, skel, feet[1])
    {
        feet[0]
    } else {
        feet[1]
    };
    let f_xy = pair.robot_bodies.positions[lowest_foot].xy();
    let com_dist = ((com[0] - f_xy[0]).powi(2) + (com[1] - f_xy[1]).powi(2)).sqrt();
    let supporting = |b| foot_height(&pair.reference_bodies, skel, b) < cfg.single_support_foot_height;
    let unbalanced = supporting(feet[0]) != supporting(feet[1]);
    let com_raw = if unbalanced { (-com_dist / cfg.sigma_sq_com).exp() } else { 0.0 };
    report.push("center_of_mass", Some(com_raw), w.center_of_mass);

    // Close feet: penalize feet closer than the threshold.
    let feet_dist =
        (pair.robot_bodies.positions[feet[0]] - pair.robot_bodies.positions[feet[1]]).norm();
    report.push(
        "close_feet",
        Some((cfg.close_feet_threshold - feet_dist).max(0.0)),
        w.close_feet,
    );

    // Feet slip: horizontal speed of loaded feet.
    match &pair.robot_frame.contact_force {
        Some(forces) if forces.len() == feet.len() => {
            let mut slip = 0.0;
            for (i, &foot) in feet.iter().enumerate() {
                if forces[i] > cfg.feet_slip_contact_threshold {
                    slip += pair.robot_bodies.linear_velocities[foot].norm_xy().sqrt();
                }
            }
            report.push("feet_slip", Some(slip), w.feet_slip);
        }
        Some(forces) => {
            return Err(MotionError::InvalidSequence(format!(
                "{} contact forces for {} feet",
                forces.len(),
                feet.len()
            )));
        }
        None => {
            log::warn!("contact forces unavailable; feet_slip term excluded from total");
            report.push("feet_slip", None, w.feet_slip);
        }
    }

    // Relative root orientation penalty.
    let root_err =
        quat_error(pair.reference_bodies.orientations[0], pair.robot_bodies.orientations[0])?;
    report.push("root_orientation", Some(root_err.norm_squared()), w.root_orientation);

    // Action-rate penalties on knee and ankle joints.
    report.push(
        "action_rate_knee",
        Some(action_rate(pair, &set_dofs(skel, body_sets::KNEES))),
        w.action_rate_knee,
    );
    report.push(
        "action_rate_ankle",
        Some(action_rate(pair, &set_dofs(skel, body_sets::ANKLES))),
        w.action_rate_ankle,
    );

    // Soft joint-limit penalty.
    let mut dof_overflow = 0.0;
    for (j, &(lo, hi)) in skel.joint_limits.iter().enumerate() {
        let p = pair.robot_frame.joint_pos[j];
        dof_overflow += (p - hi).max(0.0) + (lo - p).max(0.0);
    }
    report.push("dof_position_limits", Some(dof_overflow), w.dof_position_limits);

    // Undesired contacts: count of flagged bodies with force above gamma.
    let undesired = skel.body_set(body_sets::UNDESIRED_CONTACT);
    if undesired.is_empty() {
        report.push("undesired_contacts", Some(0.0), w.undesired_contacts);
    } else {
        match &pair.undesired_contact_forces {
            Some(forces) if forces.len() == undesired.len() => {
                let count =
                    forces.iter().filter(|&&f| f > cfg.contact_force_threshold).count() as f64;
                report.push("undesired_contacts", Some(count), w.undesired_contacts);
            }
            Some(forces) => {
                return Err(MotionError::InvalidSequence(format!(
                    "{} undesired contact forces for {} undesired bodies",
                    forces.len(),
                    undesired.len()
                )));
            }
            None => {
                log::warn!(
                    "undesired contact forces unavailable; undesired_contacts term excluded"
                );
                report.push("undesired_contacts", None, w.undesired_contacts);
            }
        }
    }

    report.recovery_active = if skel.body_set(body_sets::SHOULDERS).is_empty() {
        false
    } else {
        recovery_indicator(pair, skel, cfg)?
    };
    Ok(report)
}

/// Evaluate the three recovery reward terms for one pair.
pub fn eval_recovery_rewards(
    pair: &TrackingPair,
    skel: &SkeletonSpec,
    cfg: &RewardConfig,
) -> Result<RewardReport> {
    cfg.validate()?;
    pair.check(skel)?;
    let w = &cfg.weights;
    let shoulders = skel.body_set(body_sets::SHOULDERS);
    if shoulders.is_empty() {
        return Err(MotionError::InvalidSkeleton("skeleton defines no shoulder bodies".into()));
    }
    let mut report = RewardReport { terms: Vec::new(), total: 0.0, recovery_active: false };

    // Shoulder height penalty, world-frame z per shoulder body.
    let height_pen: f64 = shoulders
        .iter()
        .map(|&b| {
            let d = pair.reference_bodies.positions[b].z - pair.robot_bodies.positions[b].z;
            d * d
        })
        .sum();
    report.push("recovery_shoulder_height", Some(height_pen), w.recovery_shoulder_height);

    // Both remaining penalties apply only before the robot has stood up,
    // gated on the mean shoulder-height deviation.
    let h_ref = mean_shoulder_height(&pair.reference_bodies, skel)?;
    let h_rob = mean_shoulder_height(&pair.robot_bodies, skel)?;
    let gate = (h_ref - h_rob).abs() > cfg.recovery_gate_epsilon;

    let prev_com = pair.previous_com_xy.ok_or_else(|| {
        MotionError::MissingInput("previous_com_xy is required for recovery rewards".into())
    })?;
    let com = center_of_mass_xy(&pair.robot_bodies, skel);
    let drift = ((com[0] - prev_com[0]).powi(2) + (com[1] - prev_com[1]).powi(2)).sqrt();
    report.push(
        "recovery_xy_root_movement",
        Some(if gate { drift } else { 0.0 }),
        w.recovery_xy_root_movement,
    );

    let all_dofs: Vec<usize> = (0..skel.dof_count()).collect();
    let rate = action_rate(pair, &all_dofs);
    report.push(
        "recovery_action_rate",
        Some(if gate { rate } else { 0.0 }),
        w.recovery_action_rate,
    );

    report.recovery_active = recovery_indicator(pair, skel, cfg)?;
    Ok(report)
}

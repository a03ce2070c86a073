//! Root height drift correction with parabolic jump reconstruction.
//!
//! Retargeted sequences drift vertically: subjects float above the ground or
//! sink through it. The correction rebuilds the root height trajectory in
//! four passes:
//!
//! 1. align the first frame so the lowest body touches the ground;
//! 2. walk the sequence, re-aligning detected contact minima and otherwise
//!    propagating the previous corrected height plus the raw upward velocity
//!    when it exceeds the threshold;
//! 3. between each remaining height maximum and the nearest following
//!    minimum, replace interior samples with a ballistic parabola of zero
//!    initial vertical velocity at take-off;
//! 4. re-align any frame still penetrating the ground.
//!
//! Only the vertical root component changes; x, y, orientation and joint
//! angles pass through untouched.

use crate::error::{MotionError, Result};
use crate::extrema::scan_extrema;
use crate::kinematics::fk_frame;
use crate::sequence::PoseSequence;
use crate::skeleton::SkeletonSpec;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

fn default_gravity() -> f64 {
    9.81
}
fn default_velocity_threshold() -> f64 {
    1e-3
}
fn default_plateau_tolerance() -> f64 {
    1e-4
}
fn default_auto_skip_prominence() -> f64 {
    0.02
}

/// Parameters of the height correction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrectionConfig {
    /// Gravity constant. Interpreted as m/s^2 and converted to per-frame^2
    /// with the sequence fps unless `gravity_per_frame` is set, in which case
    /// it is used as m/frame^2 directly.
    pub gravity: f64,
    pub gravity_per_frame: bool,
    /// Upward-velocity threshold for propagation, meters per frame.
    pub velocity_threshold: f64,
    /// Plateau merge tolerance for extrema detection, meters.
    pub plateau_tolerance: f64,
    /// Frame indices whose maxima are excluded from jump treatment.
    pub skip_set: BTreeSet<usize>,
    /// Maxima with prominence below this height (meters) over the higher
    /// neighboring minimum are skipped automatically, so squat-stand
    /// artifacts are not reconstructed as jumps. Zero or negative disables.
    pub auto_skip_prominence: f64,
}

impl Default for CorrectionConfig {
    fn default() -> Self {
        Self {
            gravity: default_gravity(),
            gravity_per_frame: false,
            velocity_threshold: default_velocity_threshold(),
            plateau_tolerance: default_plateau_tolerance(),
            skip_set: BTreeSet::new(),
            auto_skip_prominence: default_auto_skip_prominence(),
        }
    }
}

impl CorrectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.gravity.is_nan() || self.gravity <= 0.0 {
            return Err(MotionError::InvalidConfig(format!(
                "gravity must be positive, got {}",
                self.gravity
            )));
        }
        if self.velocity_threshold < 0.0 {
            return Err(MotionError::InvalidConfig(format!(
                "velocity_threshold must be non-negative, got {}",
                self.velocity_threshold
            )));
        }
        Ok(())
    }

    fn gravity_per_frame_sq(&self, fps: f64) -> f64 {
        if self.gravity_per_frame {
            self.gravity
        } else {
            self.gravity / (fps * fps)
        }
    }
}

/// Height trajectory extrema after plateau merging and skip filtering.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtremaSet {
    pub maxima: Vec<usize>,
    pub minima: Vec<usize>,
    /// Maxima excluded from jump treatment (user skip set plus automatic
    /// low-prominence skips).
    pub skip_set: BTreeSet<usize>,
}

/// Local maxima and minima of a height trajectory.
///
/// Plateaus collapse to their midpoint frame, endpoints are never extrema,
/// and maxima listed in the config skip set or failing the prominence rule
/// are removed from the maxima list.
pub fn detect_extrema(heights: &[f64], cfg: &CorrectionConfig) -> Result<ExtremaSet> {
    let raw = scan_extrema(heights, cfg.plateau_tolerance)?;
    let mut skip = BTreeSet::new();
    for &m in &raw.maxima {
        if cfg.skip_set.contains(&m) {
            skip.insert(m);
            continue;
        }
        if cfg.auto_skip_prominence > 0.0 {
            // Reference level on each side: nearest neighboring minimum, or
            // the boundary sample when no minimum exists on that side.
            let left = raw
                .minima
                .iter()
                .rev()
                .find(|&&t| t < m)
                .map(|&t| heights[t])
                .unwrap_or(heights[0]);
            let right = raw
                .minima
                .iter()
                .find(|&&t| t > m)
                .map(|&t| heights[t])
                .unwrap_or(heights[heights.len() - 1]);
            let prominence = heights[m] - left.max(right);
            if prominence < cfg.auto_skip_prominence {
                skip.insert(m);
            }
        }
    }
    let maxima = raw.maxima.iter().copied().filter(|m| !skip.contains(m)).collect();
    Ok(ExtremaSet { maxima, minima: raw.minima, skip_set: skip })
}

/// Outcome of one detected jump segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpStatus {
    /// Interior samples replaced by the ballistic parabola.
    Reconstructed,
    /// Adjacent extrema leave no interior samples to reconstruct.
    Degenerate,
    /// No minimum follows the maximum; segment left as propagated.
    NoLandingMinimum,
    /// Apex height below landing height makes the flight time imaginary;
    /// segment left as propagated.
    ImaginaryFlightTime,
}

impl JumpStatus {
    /// Statuses that leave the segment uncorrected and warrant a warning.
    pub fn is_flagged(self) -> bool {
        matches!(self, JumpStatus::NoLandingMinimum | JumpStatus::ImaginaryFlightTime)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JumpSegment {
    /// Take-off frame (height maximum).
    pub start: usize,
    /// Landing frame (nearest following minimum), when one exists.
    pub end: Option<usize>,
    /// Ballistic flight time in seconds, when real.
    pub flight_time: Option<f64>,
    pub status: JumpStatus,
}

/// Audit trail of one correction run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrectionReport {
    pub original_heights: Vec<f64>,
    pub corrected_heights: Vec<f64>,
    /// Frames where ground alignment was applied (first frame plus accepted
    /// minima).
    pub contact_frames: Vec<usize>,
    pub jump_segments: Vec<JumpSegment>,
    /// Frames re-aligned by the final penetration pass.
    pub penetration_fixes: Vec<usize>,
    pub extrema: ExtremaSet,
}

impl CorrectionReport {
    pub fn has_flags(&self) -> bool {
        self.jump_segments.iter().any(|s| s.status.is_flagged())
    }
}

/// Correct the root height trajectory of a sequence.
///
/// Returns the corrected sequence (only root z differs) and the audit
/// report. After correction every frame satisfies `min_body_height >= 0` up
/// to rounding, with exact ground contact at accepted minima.
pub fn correct_root_height(
    seq: &PoseSequence,
    skel: &SkeletonSpec,
    cfg: &CorrectionConfig,
) -> Result<(PoseSequence, CorrectionReport)> {
    cfg.validate()?;
    skel.validate()?;
    seq.validate(skel)?;

    let n = seq.len();
    let heights = seq.root_heights();

    // Minimum body height of each original frame. Only the root z channel is
    // ever edited, which shifts every body height equally, so the minimum
    // height of a re-heighted frame is `zmin[t] - heights[t] + new_height`.
    let mut zmin = Vec::with_capacity(n);
    for frame in &seq.frames {
        let fk = fk_frame(frame, skel)?;
        let m = fk
            .positions
            .iter()
            .zip(&skel.bodies)
            .map(|(p, b)| p.z + b.z_offset)
            .fold(f64::INFINITY, f64::min);
        zmin.push(m);
    }
    let shifted_zmin = |t: usize, new_height: f64| (zmin[t] - heights[t]) + new_height;

    let extrema = if n >= 3 {
        detect_extrema(&heights, cfg)?
    } else {
        ExtremaSet { maxima: vec![], minima: vec![], skip_set: BTreeSet::new() }
    };
    let mut is_minimum = vec![false; n];
    for &t in &extrema.minima {
        is_minimum[t] = true;
    }

    let mut hat = vec![0.0; n];
    let mut contact_frames = Vec::new();

    // Pass 1+2: initial alignment, then contact alignment / thresholded
    // propagation.
    hat[0] = heights[0] - zmin[0];
    contact_frames.push(0);
    for t in 1..n {
        if is_minimum[t] {
            let aligned = heights[t] - zmin[t];
            // Alignment puts the minimum body height at exactly zero.
            if shifted_zmin(t, aligned) >= 0.0 {
                hat[t] = aligned;
                contact_frames.push(t);
                continue;
            }
        }
        let v = heights[t] - heights[t - 1];
        hat[t] = hat[t - 1] + if v > cfg.velocity_threshold { v } else { 0.0 };
    }

    // Pass 3: ballistic reconstruction of each jump segment.
    let g = cfg.gravity_per_frame_sq(seq.fps);
    let mut jump_segments = Vec::new();
    for &start in &extrema.maxima {
        let end = match extrema.minima.iter().find(|&&t| t > start) {
            Some(&t) => t,
            None => {
                log::warn!("jump at frame {start} has no landing minimum; left as propagated");
                jump_segments.push(JumpSegment {
                    start,
                    end: None,
                    flight_time: None,
                    status: JumpStatus::NoLandingMinimum,
                });
                continue;
            }
        };
        let drop = hat[start] - hat[end];
        if drop < 0.0 {
            log::warn!(
                "jump at frames {start}..{end} has apex below landing; left as propagated"
            );
            jump_segments.push(JumpSegment {
                start,
                end: Some(end),
                flight_time: None,
                status: JumpStatus::ImaginaryFlightTime,
            });
            continue;
        }
        let flight_frames = (2.0 * drop / g).sqrt();
        let flight_time = Some(flight_frames / seq.fps);
        let interior = end - start - 1;
        if interior == 0 {
            jump_segments.push(JumpSegment {
                start,
                end: Some(end),
                flight_time,
                status: JumpStatus::Degenerate,
            });
            continue;
        }
        for k in 1..=interior {
            let dt = k as f64 / (interior + 1) as f64 * flight_frames;
            hat[start + k] = hat[start] - 0.5 * g * dt * dt;
        }
        jump_segments.push(JumpSegment {
            start,
            end: Some(end),
            flight_time,
            status: JumpStatus::Reconstructed,
        });
    }

    // Pass 4: final penetration fix.
    let mut penetration_fixes = Vec::new();
    for t in 0..n {
        if shifted_zmin(t, hat[t]) < 0.0 {
            hat[t] = heights[t] - zmin[t];
            penetration_fixes.push(t);
        }
    }

    let mut frames = seq.frames.clone();
    for (t, frame) in frames.iter_mut().enumerate() {
        let shift = hat[t] - frame.root_pos.z;
        frame.root_pos.z = hat[t];
        // Cached body positions stay valid under a pure vertical root shift.
        if let Some(bp) = &mut frame.body_pos {
            for p in bp.iter_mut() {
                p.z += shift;
            }
        }
    }
    let corrected = PoseSequence::new(seq.fps, seq.skeleton_id.clone(), frames);
    let report = CorrectionReport {
        original_heights: heights,
        corrected_heights: hat,
        contact_frames,
        jump_segments,
        penetration_fixes,
        extrema,
    };
    Ok((corrected, report))
}

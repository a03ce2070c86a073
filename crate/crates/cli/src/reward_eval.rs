//! Frame-by-frame reward evaluation of a robot sequence against a
//! reference, with optional termination tracking.

use crate::config::PipelineConfig;
use anyhow::{bail, Context, Result};
use motion_forge_core::io::MotionFile;
use motion_forge_core::rewards::{
    eval_recovery_rewards, eval_tracking_rewards, RewardReport, TrackingPair,
};
use motion_forge_core::skeleton::body_sets;
use motion_forge_core::termination::{
    eval_bad_tracking, step_termination, BadTrackingFlags, TerminationState,
};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Serialize)]
pub struct FrameEval {
    pub frame: usize,
    pub tracking: RewardReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recovery: Option<RewardReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bad_flags: Option<BadTrackingFlags>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consecutive_bad: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terminated: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RewardEvalReport {
    pub frames: Vec<FrameEval>,
    /// First frame at which the termination state machine fired, when
    /// termination tracking was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_termination: Option<usize>,
}

pub fn evaluate(
    robot_path: &Path,
    reference_path: &Path,
    cfg: &PipelineConfig,
    terminate: bool,
    recovering: bool,
) -> Result<RewardEvalReport> {
    let (robot, robot_skel) = MotionFile::load(robot_path).context("loading robot sequence")?;
    let (reference, ref_skel) =
        MotionFile::load(reference_path).context("loading reference sequence")?;
    if robot_skel.name != ref_skel.name || robot_skel.dof_count() != ref_skel.dof_count() {
        bail!(
            "robot and reference skeletons differ ('{}' vs '{}')",
            robot_skel.name,
            ref_skel.name
        );
    }
    if robot.len() != reference.len() {
        bail!("robot has {} frames, reference has {}", robot.len(), reference.len());
    }
    if robot.fps != reference.fps {
        bail!("robot sampled at {} fps, reference at {} fps", robot.fps, reference.fps);
    }
    if terminate {
        cfg.termination.validate()?;
    }
    let has_shoulders = !robot_skel.body_set(body_sets::SHOULDERS).is_empty();

    let mut frames = Vec::with_capacity(robot.len());
    let mut state = TerminationState::new();
    let mut first_termination = None;
    for t in 0..robot.len() {
        let pair = TrackingPair::from_sequences(&robot, &reference, &robot_skel, t)?;
        let tracking = eval_tracking_rewards(&pair, &robot_skel, &cfg.rewards)?;
        let recovery = if has_shoulders {
            Some(eval_recovery_rewards(&pair, &robot_skel, &cfg.rewards)?)
        } else {
            None
        };
        let mut eval = FrameEval {
            frame: t,
            tracking,
            recovery,
            bad_flags: None,
            consecutive_bad: None,
            terminated: None,
        };
        if terminate {
            let flags = eval_bad_tracking(&pair, &cfg.termination);
            eval.bad_flags = Some(flags);
            if first_termination.is_none() {
                state = step_termination(&state, flags, recovering, &cfg.termination)?;
                eval.consecutive_bad = Some(state.consecutive_bad);
                eval.terminated = Some(state.terminated);
                if state.terminated {
                    first_termination = Some(t);
                }
            } else {
                // The state machine stopped at the first termination; later
                // frames only carry the raw flags.
                eval.terminated = Some(true);
            }
        }
        frames.push(eval);
    }
    if let Some(t) = first_termination {
        log::info!("sequence terminates at frame {t}");
    }
    Ok(RewardEvalReport { frames, first_termination })
}

fn fmt_opt(v: Option<f64>) -> String {
    // Normalize -0.0 so zeroed penalty columns read as plain zeros.
    v.map(|x| (x + 0.0).to_string()).unwrap_or_default()
}

/// Per-frame CSV: one column per weighted term plus total, then recovery
/// and termination columns when present.
pub fn write_csv(report: &RewardEvalReport, w: &mut impl Write) -> Result<()> {
    let first = match report.frames.first() {
        Some(f) => f,
        None => return Ok(()),
    };
    let mut header: Vec<String> = vec!["frame".into()];
    header.extend(first.tracking.terms.iter().map(|t| t.name.clone()));
    header.push("total".into());
    header.push("recovery_active".into());
    if let Some(rc) = &first.recovery {
        header.extend(rc.terms.iter().map(|t| t.name.clone()));
        header.push("recovery_total".into());
    }
    if first.bad_flags.is_some() {
        header.extend(
            ["bad_position", "bad_orientation", "bad_body", "consecutive_bad", "terminated"]
                .map(String::from),
        );
    }
    writeln!(w, "{}", header.join(","))?;

    for f in &report.frames {
        let mut row: Vec<String> = vec![f.frame.to_string()];
        row.extend(f.tracking.terms.iter().map(|t| fmt_opt(t.weighted)));
        row.push(f.tracking.total.to_string());
        row.push((f.tracking.recovery_active as u8).to_string());
        if let Some(rc) = &f.recovery {
            row.extend(rc.terms.iter().map(|t| fmt_opt(t.weighted)));
            row.push(rc.total.to_string());
        }
        if let Some(flags) = f.bad_flags {
            row.push((flags.position as u8).to_string());
            row.push((flags.orientation as u8).to_string());
            row.push((flags.body as u8).to_string());
            row.push(f.consecutive_bad.map(|v| v.to_string()).unwrap_or_default());
            row.push(f.terminated.map(|v| (v as u8).to_string()).unwrap_or_default());
        }
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

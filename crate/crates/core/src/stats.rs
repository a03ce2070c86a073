//! Kinematic dataset statistics.
//!
//! All velocity metrics are *signed means of raw per-frame forward
//! differences*, not magnitudes: a dataset where every joint swings back and
//! forth symmetrically averages to roughly zero, and uniformly negative
//! drift yields a negative entry. Per-sequence sums pool together weighted
//! by the number of difference samples each sequence contributes.

use crate::error::{MotionError, Result};
use crate::kinematics::finite_difference_velocities;
use crate::sequence::PoseSequence;
use crate::skeleton::SkeletonSpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetStats {
    /// Sampling rate of the dataset, Hz.
    pub fps: f64,
    /// Signed mean joint velocity over all dofs and frames, rad/frame.
    pub mean_joint_vel: f64,
    /// Signed mean root linear velocity pooled over x, y, z, m/frame.
    pub mean_body_lin_vel: f64,
    /// Per-axis signed mean root linear velocity, m/frame.
    pub mean_body_lin_vel_xyz: [f64; 3],
    /// Signed mean root angular velocity pooled over the rotation-vector
    /// components, rad/frame.
    pub mean_body_ang_vel: f64,
    /// Per-axis signed mean root angular velocity, rad/frame.
    pub mean_body_ang_vel_xyz: [f64; 3],
    /// Mean sequence length, frames.
    pub mean_frames: f64,
    pub sequence_count: usize,
}

impl DatasetStats {
    /// Header row of the CSV export.
    pub const CSV_HEADER: &'static str =
        "fps,joint_vel,body_lin_vel,body_ang_vel,frames,sequence_count";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.fps,
            self.mean_joint_vel,
            self.mean_body_lin_vel,
            self.mean_body_ang_vel,
            self.mean_frames,
            self.sequence_count
        )
    }
}

/// Compute dataset statistics over a collection of sequences.
///
/// Sequences with fewer than two frames contribute no velocity samples and
/// are skipped with a warning (they still count toward `mean_frames`).
pub fn compute_stats(seqs: &[PoseSequence], skel: &SkeletonSpec) -> Result<DatasetStats> {
    if seqs.is_empty() {
        return Err(MotionError::InvalidSequence("empty sequence collection".into()));
    }
    let fps = seqs[0].fps;
    if seqs.iter().any(|s| s.fps != fps) {
        log::warn!("sequence collection mixes fps values; reporting the first ({fps})");
    }

    let mut joint_sum = 0.0;
    let mut joint_count = 0u64;
    let mut lin_sum = [0.0; 3];
    let mut ang_sum = [0.0; 3];
    let mut axis_count = 0u64;
    let mut total_frames = 0usize;

    for seq in seqs {
        seq.validate(skel)?;
        total_frames += seq.len();
        if seq.len() < 2 {
            log::warn!("skipping single-frame sequence in statistics");
            continue;
        }
        let vel = finite_difference_velocities(seq, false)?;
        let genuine = seq.len() - 1;
        for t in 0..genuine {
            for v in &vel.joint_vel[t] {
                joint_sum += v;
                joint_count += 1;
            }
            let lv = vel.root_lin_vel[t];
            lin_sum[0] += lv.x;
            lin_sum[1] += lv.y;
            lin_sum[2] += lv.z;
            let av = vel.root_ang_vel[t];
            ang_sum[0] += av.x;
            ang_sum[1] += av.y;
            ang_sum[2] += av.z;
            axis_count += 1;
        }
    }

    if axis_count == 0 {
        log::warn!("no sequence contributed velocity samples; velocity means are zero");
    }
    let mean_axis = |sum: [f64; 3]| {
        if axis_count == 0 {
            [0.0; 3]
        } else {
            [sum[0] / axis_count as f64, sum[1] / axis_count as f64, sum[2] / axis_count as f64]
        }
    };
    let lin_xyz = mean_axis(lin_sum);
    let ang_xyz = mean_axis(ang_sum);
    let pooled = |sum: [f64; 3]| {
        if axis_count == 0 {
            0.0
        } else {
            (sum[0] + sum[1] + sum[2]) / (3.0 * axis_count as f64)
        }
    };
    Ok(DatasetStats {
        fps,
        mean_joint_vel: if joint_count == 0 { 0.0 } else { joint_sum / joint_count as f64 },
        mean_body_lin_vel: pooled(lin_sum),
        mean_body_lin_vel_xyz: lin_xyz,
        mean_body_ang_vel: pooled(ang_sum),
        mean_body_ang_vel_xyz: ang_xyz,
        mean_frames: total_frames as f64 / seqs.len() as f64,
        sequence_count: seqs.len(),
    })
}

//! Correction, smoothing, analysis, sampling and reward scoring for
//! retargeted humanoid motion sequences.
//!
//! Motion reconstructed from video drifts vertically and jitters locally.
//! This crate rebuilds physically plausible root height trajectories
//! (ground-contact alignment, thresholded propagation, ballistic jump
//! reconstruction, penetration fixes), smooths pose channels with a
//! Savitzky-Golay filter, computes dataset kinematics statistics, locates
//! low-kinetic-energy episode anchors with failure-adaptive sampling
//! weights, evaluates tracking/recovery reward terms, steps bad-tracking
//! termination logic, and augments fall-pose pools by recombining
//! rotational components.
//!
//! All operations are pure transformations over [`PoseSequence`] and
//! [`SkeletonSpec`]; sequences and skeletons are immutable after
//! construction and safe to share across threads.

pub mod augment;
pub mod correction;
pub mod error;
pub mod extrema;
pub mod io;
pub mod kinematics;
pub mod math;
pub mod rewards;
pub mod sampling;
pub mod sequence;
pub mod skeleton;
pub mod smoothing;
pub mod stats;
pub mod termination;

pub use augment::{recombine, PoolPose, PosePool};
pub use correction::{
    correct_root_height, detect_extrema, CorrectionConfig, CorrectionReport, ExtremaSet,
    JumpSegment, JumpStatus,
};
pub use error::{MotionError, Result};
pub use io::{write_csv, MotionFile, MOTION_FORMAT_VERSION};
pub use kinematics::{
    finite_difference_velocities, forward_kinematics, min_body_height, FkResult, FrameVelocities,
};
pub use math::{Quat, Vec3};
pub use rewards::{
    eval_recovery_rewards, eval_tracking_rewards, quat_error, recovery_indicator, BodyKinematics,
    RewardConfig, RewardReport, RewardWeights, TrackingPair,
};
pub use sampling::{detect_anchors, kinetic_energy_proxy, AnchorSampler, SamplerParams};
pub use sequence::{Frame, PoseSequence};
pub use skeleton::{Body, SkeletonSpec};
pub use smoothing::{sg_filter, smooth_sequence, ChannelSelect, SgConfig, WindowSpec};
pub use stats::{compute_stats, DatasetStats};
pub use termination::{
    eval_bad_tracking, projected_gravity_threshold_for_tilt, step_termination, BadTrackingFlags,
    TerminationConfig, TerminationState,
};

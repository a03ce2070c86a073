//! Motion file format.
//!
//! A motion file is a JSON document with a versioned header and a frames
//! array:
//!
//! ```json
//! {
//!   "version": 1,
//!   "fps": 50.0,
//!   "skeleton": { "name": "...", "bodies": [...], "dof_map": [...],
//!                 "body_sets": {...}, "joint_limits": [...] },
//!   "frames": [
//!     { "root_pos": [x, y, z], "root_quat": [w, x, y, z],
//!       "joint_pos": [...] }
//!   ]
//! }
//! ```
//!
//! Numbers are 64-bit floats in decimal; quaternions are `(w, x, y, z)`.
//! Unknown keys are rejected. A flat CSV export (one row per frame, columns
//! `root_px,root_py,root_pz,root_qw,root_qx,root_qy,root_qz,joint_0,...`)
//! is provided for plotting.

use crate::error::{MotionError, Result};
use crate::sequence::{Frame, PoseSequence};
use crate::skeleton::SkeletonSpec;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

/// Current motion file format version.
pub const MOTION_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotionFile {
    pub version: u32,
    pub fps: f64,
    pub skeleton: SkeletonSpec,
    pub frames: Vec<Frame>,
}

impl MotionFile {
    /// Bundle a sequence with its skeleton for writing.
    pub fn from_parts(seq: &PoseSequence, skel: &SkeletonSpec) -> Result<Self> {
        seq.validate(skel)?;
        Ok(Self {
            version: MOTION_FORMAT_VERSION,
            fps: seq.fps,
            skeleton: skel.clone(),
            frames: seq.frames.clone(),
        })
    }

    /// Split into a validated sequence and skeleton.
    pub fn into_parts(self) -> Result<(PoseSequence, SkeletonSpec)> {
        if self.version != MOTION_FORMAT_VERSION {
            return Err(MotionError::UnsupportedVersion(self.version));
        }
        self.skeleton.validate()?;
        let seq = PoseSequence::new(self.fps, self.skeleton.name.clone(), self.frames);
        seq.validate(&self.skeleton)?;
        Ok((seq, self.skeleton))
    }

    pub fn from_reader(r: impl Read) -> Result<Self> {
        Ok(serde_json::from_reader(r)?)
    }

    pub fn to_writer(&self, w: impl Write) -> Result<()> {
        let mut w = w;
        serde_json::to_writer_pretty(&mut w, self)?;
        w.write_all(b"\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<(PoseSequence, SkeletonSpec)> {
        let file = File::open(path.as_ref())?;
        Self::from_reader(BufReader::new(file))?.into_parts()
    }

    pub fn save(path: impl AsRef<Path>, seq: &PoseSequence, skel: &SkeletonSpec) -> Result<()> {
        let doc = Self::from_parts(seq, skel)?;
        let file = File::create(path.as_ref())?;
        doc.to_writer(BufWriter::new(file))
    }
}

/// Write the flat CSV export of a sequence.
pub fn write_csv(seq: &PoseSequence, w: impl Write) -> Result<()> {
    let mut w = w;
    let dof = seq.frames.first().map(|f| f.joint_pos.len()).unwrap_or(0);
    let mut header =
        String::from("root_px,root_py,root_pz,root_qw,root_qx,root_qy,root_qz");
    for j in 0..dof {
        header.push_str(&format!(",joint_{j}"));
    }
    writeln!(w, "{header}")?;
    for frame in &seq.frames {
        let mut row = format!(
            "{},{},{},{},{},{},{}",
            frame.root_pos.x,
            frame.root_pos.y,
            frame.root_pos.z,
            frame.root_quat.w,
            frame.root_quat.x,
            frame.root_quat.y,
            frame.root_quat.z
        );
        for v in &frame.joint_pos {
            row.push_str(&format!(",{v}"));
        }
        writeln!(w, "{row}")?;
    }
    Ok(())
}

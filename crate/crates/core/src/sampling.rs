//! Low-kinetic-energy anchor detection and failure-adaptive episode
//! sampling.
//!
//! Episodes initialized at high-velocity frames are often unrecoverable, so
//! start frames are restricted to anchors: local minima of a per-frame
//! kinetic-energy proxy. Each anchor carries a sampling weight; when an
//! episode fails, the weight of the nearest preceding anchor is bumped and
//! clipped, biasing future draws toward hard segments without letting any
//! anchor dominate.

use crate::error::{MotionError, Result};
use crate::extrema::scan_extrema;
use crate::kinematics::finite_difference_velocities;
use crate::sequence::PoseSequence;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// RNG algorithm identifier persisted in sampler state.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Plateau tolerance used when scanning energy minima.
const ENERGY_PLATEAU_TOLERANCE: f64 = 1e-12;

/// Scalar kinetic-energy proxy per frame: the sum of absolute joint
/// velocities.
///
/// Frame-carried joint velocities are used when every frame has them;
/// otherwise raw per-frame forward differences are taken (anchor locations
/// are invariant to the velocity scale).
pub fn kinetic_energy_proxy(seq: &PoseSequence) -> Result<Vec<f64>> {
    let have_vel = !seq.is_empty() && seq.frames.iter().all(|f| f.joint_vel.is_some());
    if have_vel {
        return Ok(seq
            .frames
            .iter()
            .map(|f| f.joint_vel.as_ref().unwrap().iter().map(|v| v.abs()).sum())
            .collect());
    }
    if seq.len() < 2 {
        return Err(MotionError::MissingInput(
            "joint velocities (provide joint_vel or at least 2 frames)".into(),
        ));
    }
    let vel = finite_difference_velocities(seq, false)?;
    Ok(vel.joint_vel.iter().map(|jv| jv.iter().map(|v| v.abs()).sum()).collect())
}

/// Anchor frames: local minima of the energy profile, plateau-merged, with
/// frame 0 always included so every failure has a preceding anchor.
pub fn detect_anchors(energy: &[f64]) -> Result<Vec<usize>> {
    let minima = scan_extrema(energy, ENERGY_PLATEAU_TOLERANCE)?.minima;
    let mut anchors = Vec::with_capacity(minima.len() + 1);
    if minima.first() != Some(&0) {
        anchors.push(0);
    }
    anchors.extend(minima);
    Ok(anchors)
}

/// Weight-update parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerParams {
    /// Weight increment applied on failure.
    pub alpha: f64,
    pub w_min: f64,
    pub w_max: f64,
}

impl Default for SamplerParams {
    fn default() -> Self {
        Self { alpha: 0.5, w_min: 1.0, w_max: 10.0 }
    }
}

/// Categorical sampler over anchor frames with failure-adapted weights.
///
/// Single-writer: `record_failure` and `sample_anchor` mutate state and must
/// be externally serialized; snapshots (via `clone` or serialization) may be
/// shared freely.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SamplerRepr", into = "SamplerRepr")]
pub struct AnchorSampler {
    anchors: Vec<usize>,
    weights: Vec<f64>,
    params: SamplerParams,
    seed: u64,
    rng: ChaCha8Rng,
}

/// Serialized sampler state. `rng_state` pins the generator algorithm and
/// stream position so sampling replays bit-exactly across runs.
#[derive(Serialize, Deserialize)]
struct SamplerRepr {
    anchors: Vec<usize>,
    weights: Vec<f64>,
    alpha: f64,
    clip: [f64; 2],
    rng_state: RngStateRepr,
}

#[derive(Serialize, Deserialize)]
struct RngStateRepr {
    algorithm: String,
    seed: u64,
    word_pos: u128,
}

impl TryFrom<SamplerRepr> for AnchorSampler {
    type Error = String;
    fn try_from(r: SamplerRepr) -> std::result::Result<Self, String> {
        if r.rng_state.algorithm != RNG_ALGORITHM {
            return Err(format!(
                "unsupported rng algorithm '{}', expected '{RNG_ALGORITHM}'",
                r.rng_state.algorithm
            ));
        }
        if r.anchors.len() != r.weights.len() {
            return Err(format!(
                "{} anchors but {} weights",
                r.anchors.len(),
                r.weights.len()
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(r.rng_state.seed);
        rng.set_word_pos(r.rng_state.word_pos);
        let sampler = AnchorSampler {
            anchors: r.anchors,
            weights: r.weights,
            params: SamplerParams { alpha: r.alpha, w_min: r.clip[0], w_max: r.clip[1] },
            seed: r.rng_state.seed,
            rng,
        };
        sampler.check().map_err(|e| e.to_string())?;
        Ok(sampler)
    }
}

impl From<AnchorSampler> for SamplerRepr {
    fn from(s: AnchorSampler) -> Self {
        SamplerRepr {
            anchors: s.anchors,
            weights: s.weights,
            alpha: s.params.alpha,
            clip: [s.params.w_min, s.params.w_max],
            rng_state: RngStateRepr {
                algorithm: RNG_ALGORITHM.into(),
                seed: s.seed,
                word_pos: s.rng.get_word_pos(),
            },
        }
    }
}

impl AnchorSampler {
    /// Sampler over sorted anchor frames, all weights initialized to 1
    /// (clipped into the configured bounds).
    pub fn new(anchors: Vec<usize>, params: SamplerParams, seed: u64) -> Result<Self> {
        let w0 = 1.0_f64.clamp(params.w_min, params.w_max);
        let weights = vec![w0; anchors.len()];
        let sampler = Self { anchors, weights, params, seed, rng: ChaCha8Rng::seed_from_u64(seed) };
        sampler.check()?;
        Ok(sampler)
    }

    /// Detect anchors from an energy profile and build a sampler over them.
    pub fn from_energy(energy: &[f64], params: SamplerParams, seed: u64) -> Result<Self> {
        Self::new(detect_anchors(energy)?, params, seed)
    }

    fn check(&self) -> Result<()> {
        if self.anchors.is_empty() {
            return Err(MotionError::InvalidConfig("anchor set is empty".into()));
        }
        if !self.anchors.windows(2).all(|w| w[0] < w[1]) {
            return Err(MotionError::InvalidConfig("anchors must be strictly sorted".into()));
        }
        let (lo, hi) = (self.params.w_min, self.params.w_max);
        if lo.is_nan() || hi.is_nan() || lo > hi || lo < 0.0 || hi <= 0.0 {
            return Err(MotionError::InvalidConfig(format!(
                "invalid clip bounds [{}, {}]",
                lo, hi
            )));
        }
        if self.params.alpha < 0.0 {
            return Err(MotionError::InvalidConfig("alpha must be non-negative".into()));
        }
        if self
            .weights
            .iter()
            .any(|&w| !(w >= self.params.w_min && w <= self.params.w_max))
        {
            return Err(MotionError::InvalidConfig("weights outside clip bounds".into()));
        }
        Ok(())
    }

    pub fn anchors(&self) -> &[usize] {
        &self.anchors
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn params(&self) -> SamplerParams {
        self.params
    }

    /// Normalized sampling probabilities `w_k / sum(w)`.
    pub fn probabilities(&self) -> Vec<f64> {
        let total: f64 = self.weights.iter().sum();
        self.weights.iter().map(|w| w / total).collect()
    }

    /// Attribute a failure at frame `t_f` to the nearest preceding anchor and
    /// bump that anchor's weight by alpha, clipped into bounds. Exactly one
    /// weight changes.
    pub fn record_failure(&mut self, t_f: usize) {
        let k = match self.anchors.partition_point(|&b| b <= t_f) {
            0 => {
                // No preceding anchor (only possible when anchors[0] > 0):
                // attribute to the first anchor.
                log::warn!("failure at frame {t_f} precedes the first anchor; attributing to it");
                0
            }
            p => p - 1,
        };
        self.weights[k] =
            (self.weights[k] + self.params.alpha).clamp(self.params.w_min, self.params.w_max);
    }

    /// Draw an anchor frame from the categorical distribution
    /// `p(b_k) = w_k / sum(w)`. Deterministic given the seed and draw count.
    pub fn sample_anchor(&mut self) -> usize {
        let total: f64 = self.weights.iter().sum();
        let x: f64 = self.rng.random_range(0.0..total);
        let mut acc = 0.0;
        for (k, &w) in self.weights.iter().enumerate() {
            acc += w;
            if x < acc {
                return self.anchors[k];
            }
        }
        *self.anchors.last().unwrap()
    }
}

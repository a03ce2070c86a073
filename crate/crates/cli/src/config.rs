//! Pipeline configuration file.
//!
//! One TOML document with optional sections for every stage; omitted
//! sections and keys take their documented defaults. Unknown keys are
//! rejected with an error naming the offending key.

use anyhow::{Context, Result};
use motion_forge_core::correction::CorrectionConfig;
use motion_forge_core::rewards::RewardConfig;
use motion_forge_core::smoothing::SgConfig;
use motion_forge_core::termination::TerminationConfig;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingSection {
    pub alpha: f64,
    pub w_min: f64,
    pub w_max: f64,
    pub seed: u64,
}

impl Default for SamplingSection {
    fn default() -> Self {
        Self { alpha: 0.5, w_min: 1.0, w_max: 10.0, seed: 0 }
    }
}

impl SamplingSection {
    pub fn params(&self) -> motion_forge_core::sampling::SamplerParams {
        motion_forge_core::sampling::SamplerParams {
            alpha: self.alpha,
            w_min: self.w_min,
            w_max: self.w_max,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IoSection {
    pub input_dir: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub correction: CorrectionConfig,
    pub smoothing: SgConfig,
    pub rewards: RewardConfig,
    pub termination: TerminationConfig,
    pub sampling: SamplingSection,
    pub io: IoSection,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: Self = toml::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        Ok(cfg)
    }

    /// Load from an optional path, falling back to defaults.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::load(p),
            None => Ok(Self::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use motion_forge_core::smoothing::WindowSpec;

    #[test]
    fn empty_config_is_defaults() {
        let cfg: PipelineConfig = toml::from_str("").unwrap();
        assert_eq!(cfg.correction.gravity, 9.81);
        assert_eq!(cfg.smoothing.poly_order, 3);
        assert_eq!(cfg.sampling.alpha, 0.5);
    }

    #[test]
    fn partial_sections_merge_with_defaults() {
        let cfg: PipelineConfig = toml::from_str(
            r#"
            [correction]
            velocity_threshold = 0.002
            skip_set = [4, 9]

            [smoothing]
            window = 11

            [rewards.weights]
            feet_slip = -5.0
            "#,
        )
        .unwrap();
        assert_eq!(cfg.correction.velocity_threshold, 0.002);
        assert_eq!(cfg.correction.gravity, 9.81);
        assert!(cfg.correction.skip_set.contains(&9));
        assert_eq!(cfg.smoothing.window, WindowSpec::Fixed(11));
        assert_eq!(cfg.rewards.weights.feet_slip, -5.0);
        assert_eq!(cfg.rewards.weights.body_position, 4.0);
    }

    #[test]
    fn unknown_key_rejected_with_name() {
        let err = toml::from_str::<PipelineConfig>("[correction]\ngarvity = 9.81\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("garvity"), "error should name the key: {msg}");
    }

    #[test]
    fn unknown_section_rejected() {
        let err = toml::from_str::<PipelineConfig>("[corections]\n").unwrap_err();
        assert!(err.to_string().contains("corections"));
    }

    #[test]
    fn adaptive_window_spelled_out() {
        let cfg: PipelineConfig =
            toml::from_str("[smoothing]\nwindow = \"adaptive\"\n").unwrap();
        assert_eq!(cfg.smoothing.window, WindowSpec::Adaptive);
    }
}

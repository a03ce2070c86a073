//! motion-forge: correct, smooth, analyze, sample and score retargeted
//! humanoid motion sequences.
//!
//! Exit codes: 0 on success, 1 on hard error, 2 when processing completed
//! with flagged warnings. The `MOTION_FORGE_LOG` environment variable sets
//! the log level.

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use motion_forge::config::{OutputFormat, PipelineConfig};
use motion_forge::{pipeline, reward_eval};
use motion_forge_core::augment::{recombine, PosePool};
use motion_forge_core::correction::correct_root_height;
use motion_forge_core::io::{write_csv, MotionFile};
use motion_forge_core::sampling::{kinetic_energy_proxy, AnchorSampler};
use motion_forge_core::sequence::{Frame, PoseSequence};
use motion_forge_core::smoothing::{smooth_sequence, ChannelSelect, WindowSpec};
use motion_forge_core::stats::{compute_stats, DatasetStats};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "motion-forge", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Correct root height drift with parabolic jump reconstruction.
    Correct {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Where to write the correction report JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
    },
    /// Savitzky-Golay smoothing of root position and joint channels.
    Smooth {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Window length: an odd sample count or "adaptive".
        #[arg(long)]
        window: Option<String>,
        /// Polynomial order of the local fit.
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
    },
    /// Kinematic statistics over one or more sequences.
    Stats {
        #[arg(long)]
        input: Vec<PathBuf>,
        #[arg(long)]
        input_dir: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
    },
    /// Detect low-kinetic-energy anchors and write the sampler state.
    Anchors {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        w_min: Option<f64>,
        #[arg(long)]
        w_max: Option<f64>,
    },
    /// Evaluate tracking and recovery reward terms frame by frame.
    RewardEval {
        #[arg(long)]
        robot: PathBuf,
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
        /// Also run the bad-tracking termination state machine.
        #[arg(long)]
        terminate: bool,
        /// Treat the episode as a recovery task (grace counter applies).
        #[arg(long)]
        recovering: bool,
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
    },
    /// Recombine a fall-pose pool into augmented grounded poses.
    Augment {
        #[arg(long)]
        pool: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Full batch pipeline: correct, smooth, stats, anchors per file.
    Pipeline {
        #[arg(long)]
        input_dir: Option<PathBuf>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Concurrent file jobs.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Whether the run completed cleanly or with flagged warnings.
enum Outcome {
    Clean,
    Flagged,
}

fn save_sequence(
    path: &Path,
    seq: &PoseSequence,
    skel: &motion_forge_core::skeleton::SkeletonSpec,
    format: OutputFormat,
) -> Result<()> {
    match format {
        OutputFormat::Json => MotionFile::save(path, seq, skel)?,
        OutputFormat::Csv => {
            let file = File::create(path)?;
            write_csv(seq, BufWriter::new(file))?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Correct { input, output, report, config, format } => {
            let cfg = PipelineConfig::load_or_default(config.as_deref())?;
            let (seq, skel) = MotionFile::load(&input)
                .with_context(|| format!("loading {}", input.display()))?;
            let (corrected, corr_report) = correct_root_height(&seq, &skel, &cfg.correction)?;
            save_sequence(&output, &corrected, &skel, format.unwrap_or(cfg.io.format))?;
            if let Some(report_path) = report {
                let mut buf = serde_json::to_vec_pretty(&corr_report)?;
                buf.push(b'\n');
                std::fs::write(&report_path, buf)
                    .with_context(|| format!("writing {}", report_path.display()))?;
            }
            if corr_report.has_flags() {
                log::warn!("correction completed with flagged jump segments");
                return Ok(Outcome::Flagged);
            }
            Ok(Outcome::Clean)
        }
        Command::Smooth { input, output, window, order, config, format } => {
            let mut cfg = PipelineConfig::load_or_default(config.as_deref())?;
            if let Some(w) = window {
                cfg.smoothing.window = if w == "adaptive" {
                    WindowSpec::Adaptive
                } else {
                    WindowSpec::Fixed(
                        w.parse().with_context(|| format!("invalid window '{w}'"))?,
                    )
                };
            }
            if let Some(p) = order {
                cfg.smoothing.poly_order = p;
            }
            let (seq, skel) = MotionFile::load(&input)?;
            let smoothed = smooth_sequence(&seq, &cfg.smoothing, ChannelSelect::default())?;
            save_sequence(&output, &smoothed, &skel, format.unwrap_or(cfg.io.format))?;
            Ok(Outcome::Clean)
        }
        Command::Stats { input, input_dir, output, format } => {
            let mut paths = input;
            if let Some(dir) = input_dir {
                let mut found: Vec<PathBuf> = std::fs::read_dir(&dir)
                    .with_context(|| format!("reading {}", dir.display()))?
                    .filter_map(|e| e.ok())
                    .map(|e| e.path())
                    .filter(|p| p.extension().map(|e| e == "json").unwrap_or(false))
                    .collect();
                found.sort();
                paths.extend(found);
            }
            if paths.is_empty() {
                bail!("no input sequences");
            }
            let mut skeleton = None;
            let mut seqs = Vec::new();
            for p in &paths {
                let (seq, skel) = MotionFile::load(p)
                    .with_context(|| format!("loading {}", p.display()))?;
                match &skeleton {
                    None => skeleton = Some(skel),
                    Some(existing) => {
                        if existing.name != skel.name {
                            bail!(
                                "mixed skeletons: '{}' and '{}'",
                                existing.name,
                                skel.name
                            );
                        }
                    }
                }
                seqs.push(seq);
            }
            let stats = compute_stats(&seqs, skeleton.as_ref().unwrap())?;
            let mut out = BufWriter::new(File::create(&output)?);
            match format.unwrap_or(OutputFormat::Csv) {
                OutputFormat::Csv => {
                    writeln!(out, "{}", DatasetStats::CSV_HEADER)?;
                    writeln!(out, "{}", stats.csv_row())?;
                }
                OutputFormat::Json => {
                    serde_json::to_writer_pretty(&mut out, &stats)?;
                    writeln!(out)?;
                }
            }
            Ok(Outcome::Clean)
        }
        Command::Anchors { input, output, config, seed, alpha, w_min, w_max } => {
            let mut cfg = PipelineConfig::load_or_default(config.as_deref())?;
            if let Some(s) = seed {
                cfg.sampling.seed = s;
            }
            if let Some(a) = alpha {
                cfg.sampling.alpha = a;
            }
            if let Some(w) = w_min {
                cfg.sampling.w_min = w;
            }
            if let Some(w) = w_max {
                cfg.sampling.w_max = w;
            }
            let (seq, _) = MotionFile::load(&input)?;
            let energy = kinetic_energy_proxy(&seq)?;
            let sampler = AnchorSampler::from_energy(&energy, cfg.sampling.params(), cfg.sampling.seed)?;
            let mut buf = serde_json::to_vec_pretty(&sampler)?;
            buf.push(b'\n');
            std::fs::write(&output, buf)?;
            Ok(Outcome::Clean)
        }
        Command::RewardEval { robot, reference, config, output, terminate, recovering, format } => {
            let cfg = PipelineConfig::load_or_default(config.as_deref())?;
            let report = reward_eval::evaluate(&robot, &reference, &cfg, terminate, recovering)?;
            let mut out = BufWriter::new(File::create(&output)?);
            match format.unwrap_or(OutputFormat::Csv) {
                OutputFormat::Csv => reward_eval::write_csv(&report, &mut out)?,
                OutputFormat::Json => {
                    serde_json::to_writer_pretty(&mut out, &report)?;
                    writeln!(out)?;
                }
            }
            Ok(Outcome::Clean)
        }
        Command::Augment { pool, count, seed, output } => {
            let (pool_seq, skel) = MotionFile::load(&pool)
                .with_context(|| format!("loading pool {}", pool.display()))?;
            let tag = pool
                .file_stem()
                .map(|s| s.to_string_lossy().to_string())
                .unwrap_or_else(|| "pool".into());
            let mut pose_pool = PosePool::from_sequence(&pool_seq, &tag, seed.unwrap_or(0));
            if let Some(s) = seed {
                pose_pool.rng_seed = s;
            }
            let poses = recombine(&pose_pool, count, &skel)?;
            let frames: Vec<Frame> = poses
                .iter()
                .map(|p| Frame::new(p.root_pos, p.root_quat, p.joint_pos.clone()))
                .collect();
            let out_seq = PoseSequence::new(pool_seq.fps, skel.name.clone(), frames);
            MotionFile::save(&output, &out_seq, &skel)?;
            Ok(Outcome::Clean)
        }
        Command::Pipeline { input_dir, output_dir, config, jobs, seed } => {
            let cfg = PipelineConfig::load_or_default(config.as_deref())?;
            let input_dir = input_dir
                .or_else(|| cfg.io.input_dir.clone())
                .ok_or_else(|| anyhow::anyhow!("no input directory (flag --input-dir or [io] input_dir)"))?;
            let output_dir = output_dir
                .or_else(|| cfg.io.output_dir.clone())
                .ok_or_else(|| anyhow::anyhow!("no output directory (flag --output-dir or [io] output_dir)"))?;
            let outcome = pipeline::run_pipeline(
                &cfg,
                &input_dir,
                &output_dir,
                jobs.unwrap_or(1),
                seed.unwrap_or(cfg.sampling.seed),
            )?;
            if outcome.any_failed() {
                bail!(
                    "{} of {} files failed",
                    outcome.files.iter().filter(|f| f.status == pipeline::FileStatus::Failed).count(),
                    outcome.files.len()
                );
            }
            if outcome.any_flagged() {
                return Ok(Outcome::Flagged);
            }
            Ok(Outcome::Clean)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("MOTION_FORGE_LOG"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Clean) => ExitCode::from(0),
        Ok(Outcome::Flagged) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

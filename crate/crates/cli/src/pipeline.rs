//! Batch pipeline: correct -> smooth -> stats -> anchors over a directory
//! of motion files.
//!
//! Files are processed in filename order (concurrently up to a job bound);
//! one malformed file never aborts the batch. For every input `name.json`
//! the pipeline writes the processed sequence to `name.json` and a combined
//! report to `name.report.json` in the output directory, plus an aggregate
//! `stats.csv` (one row per skeleton) and a `pipeline_summary.json` listing
//! per-file outcomes. Identical inputs, config and seed produce
//! byte-identical output trees.

use crate::config::PipelineConfig;
use anyhow::{bail, Context, Result};
use motion_forge_core::correction::{correct_root_height, CorrectionReport};
use motion_forge_core::io::MotionFile;
use motion_forge_core::sampling::{kinetic_energy_proxy, AnchorSampler};
use motion_forge_core::sequence::PoseSequence;
use motion_forge_core::skeleton::SkeletonSpec;
use motion_forge_core::smoothing::{smooth_sequence, ChannelSelect};
use motion_forge_core::stats::{compute_stats, DatasetStats};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FileStatus {
    Ok,
    /// Completed, but the correction flagged at least one jump segment.
    Flagged,
    Failed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileOutcome {
    pub file: String,
    pub status: FileStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineOutcome {
    pub files: Vec<FileOutcome>,
}

impl PipelineOutcome {
    pub fn any_failed(&self) -> bool {
        self.files.iter().any(|f| f.status == FileStatus::Failed)
    }

    pub fn any_flagged(&self) -> bool {
        self.files.iter().any(|f| f.status == FileStatus::Flagged)
    }
}

/// Per-file combined report written next to the processed sequence.
#[derive(Serialize)]
struct FileReport<'a> {
    file: &'a str,
    flagged: bool,
    correction: &'a CorrectionReport,
    sampler: &'a AnchorSampler,
}

struct Processed {
    sequence: PoseSequence,
    skeleton: SkeletonSpec,
    flagged: bool,
}

fn process_one(
    path: &Path,
    name: &str,
    cfg: &PipelineConfig,
    seed: u64,
    output_dir: &Path,
) -> Result<Processed> {
    let (seq, skel) = MotionFile::load(path).with_context(|| format!("loading {name}"))?;
    let (corrected, report) =
        correct_root_height(&seq, &skel, &cfg.correction).with_context(|| format!("correcting {name}"))?;
    let smoothed = smooth_sequence(&corrected, &cfg.smoothing, ChannelSelect::default())
        .with_context(|| format!("smoothing {name}"))?;
    let energy = kinetic_energy_proxy(&smoothed).with_context(|| format!("energy of {name}"))?;
    let sampler = AnchorSampler::from_energy(&energy, cfg.sampling.params(), seed)
        .with_context(|| format!("anchors of {name}"))?;

    let flagged = report.has_flags();
    MotionFile::save(output_dir.join(name), &smoothed, &skel)
        .with_context(|| format!("writing output for {name}"))?;
    let report_doc = FileReport { file: name, flagged, correction: &report, sampler: &sampler };
    let report_path = output_dir.join(format!("{}.report.json", name.trim_end_matches(".json")));
    let mut buf = serde_json::to_vec_pretty(&report_doc)?;
    buf.push(b'\n');
    std::fs::write(&report_path, buf)
        .with_context(|| format!("writing report for {name}"))?;
    Ok(Processed { sequence: smoothed, skeleton: skel, flagged })
}

pub fn run_pipeline(
    cfg: &PipelineConfig,
    input_dir: &Path,
    output_dir: &Path,
    jobs: usize,
    seed: u64,
) -> Result<PipelineOutcome> {
    let mut inputs: Vec<PathBuf> = std::fs::read_dir(input_dir)
        .with_context(|| format!("reading input directory {}", input_dir.display()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.is_file()
                && p.extension().map(|e| e == "json").unwrap_or(false)
                && !p.file_name().map(|n| n.to_string_lossy().ends_with(".report.json")).unwrap_or(false)
        })
        .collect();
    inputs.sort();
    if inputs.is_empty() {
        bail!("no input sequences in {}", input_dir.display());
    }
    std::fs::create_dir_all(output_dir)
        .with_context(|| format!("creating output directory {}", output_dir.display()))?;

    let jobs = jobs.max(1);
    let next = AtomicUsize::new(0);
    type Slot = Option<(FileOutcome, Option<Processed>)>;
    let results: Mutex<Vec<Slot>> = Mutex::new((0..inputs.len()).map(|_| None).collect());

    std::thread::scope(|scope| {
        for _ in 0..jobs.min(inputs.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= inputs.len() {
                    break;
                }
                let path = &inputs[i];
                let name = path.file_name().unwrap().to_string_lossy().to_string();
                let entry = match process_one(path, &name, cfg, seed, output_dir) {
                    Ok(done) => {
                        let status = if done.flagged { FileStatus::Flagged } else { FileStatus::Ok };
                        (FileOutcome { file: name, status, error: None }, Some(done))
                    }
                    Err(e) => {
                        log::error!("{name}: {e:#}");
                        (
                            FileOutcome {
                                file: name,
                                status: FileStatus::Failed,
                                error: Some(format!("{e:#}")),
                            },
                            None,
                        )
                    }
                };
                results.lock().unwrap()[i] = Some(entry);
            });
        }
    });

    let collected: Vec<(FileOutcome, Option<Processed>)> =
        results.into_inner().unwrap().into_iter().map(|r| r.unwrap()).collect();

    // Aggregate statistics per skeleton group, in deterministic order.
    let mut groups: BTreeMap<String, (SkeletonSpec, Vec<PoseSequence>)> = BTreeMap::new();
    for (_, processed) in &collected {
        if let Some(p) = processed {
            let entry = groups
                .entry(p.skeleton.name.clone())
                .or_insert_with(|| (p.skeleton.clone(), Vec::new()));
            if p.sequence.validate(&entry.0).is_ok() {
                entry.1.push(p.sequence.clone());
            } else {
                log::warn!(
                    "sequence skipped from stats: skeleton '{}' differs between files",
                    p.skeleton.name
                );
            }
        }
    }
    let mut csv = format!("skeleton,{}\n", DatasetStats::CSV_HEADER);
    for (name, (skel, seqs)) in &groups {
        if seqs.is_empty() {
            continue;
        }
        let stats = compute_stats(seqs, skel)?;
        csv.push_str(&format!("{name},{}\n", stats.csv_row()));
    }
    std::fs::write(output_dir.join("stats.csv"), csv).context("writing stats.csv")?;

    let outcome =
        PipelineOutcome { files: collected.into_iter().map(|(outcome, _)| outcome).collect() };
    let mut summary = serde_json::to_vec_pretty(&outcome)?;
    summary.push(b'\n');
    std::fs::write(output_dir.join("pipeline_summary.json"), summary)
        .context("writing pipeline_summary.json")?;
    Ok(outcome)
}

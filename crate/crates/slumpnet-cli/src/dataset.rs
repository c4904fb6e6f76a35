//! Manifest-driven dataset assembly: read each clip, run the
//! preprocessing pipeline, and collect the resulting windows per split.

use std::path::Path;

use slumpnet_core::pipeline::{process_clip, PipelineConfig, RoiSpec};
use slumpnet_core::synth::Split;
use slumpnet_core::train::DataSet;

use crate::config::RunConfig;
use crate::manifest::{read_manifest, ManifestRow};
use crate::{cwv, CliError, CliResult};

/// Builds the pipeline stage configuration from the geometry keys.
pub fn pipeline_from(cfg: &RunConfig) -> CliResult<PipelineConfig> {
    let target_fps = cfg.get_u32("target_fps")?;
    let tail = cfg.get_f64("tail_seconds")?;
    let radius = cfg.get_f64("roi_radius")?;
    Ok(PipelineConfig {
        target_fps: (target_fps > 0).then_some(target_fps),
        tail_seconds: (tail > 0.0).then_some(tail),
        window_seconds: cfg.get_f64("window_seconds")?,
        height: cfg.get_usize("input_height")?,
        width: cfg.get_usize("input_width")?,
        roi: (radius > 0.0).then_some(RoiSpec {
            center_y: cfg.get_f64("roi_center_y")?,
            center_x: cfg.get_f64("roi_center_x")?,
            radius,
        }),
    })
}

#[derive(Debug, Default)]
pub struct SplitSets {
    pub train: DataSet<f32>,
    pub val: DataSet<f32>,
    pub test: DataSet<f32>,
}

impl SplitSets {
    pub fn get(&self, split: Split) -> &DataSet<f32> {
        match split {
            Split::Train => &self.train,
            Split::Val => &self.val,
            Split::Test => &self.test,
        }
    }

    fn get_mut(&mut self, split: Split) -> &mut DataSet<f32> {
        match split {
            Split::Train => &mut self.train,
            Split::Val => &mut self.val,
            Split::Test => &mut self.test,
        }
    }
}

#[derive(Debug)]
pub struct BuildReport {
    pub sets: SplitSets,
    /// Clips per split that contributed windows.
    pub clips: [usize; 3],
    /// `(path, reason)` for every clip that had to be dropped.
    pub skipped: Vec<(String, String)>,
}

/// Reads every manifest row of the wanted splits and pushes each
/// preprocessed window into its split's dataset.
///
/// Unreadable or too-short clips are skipped with a recorded reason; a
/// skip rate above 10% (always tolerating one) aborts the build.
/// `per_split_limit` > 0 keeps only the first n clips of each split.
pub fn build_datasets(
    manifest_path: &Path,
    pipe: &PipelineConfig,
    per_split_limit: usize,
    wanted: &[Split],
) -> CliResult<BuildReport> {
    let rows = read_manifest(manifest_path)?;
    if rows.is_empty() {
        return Err(CliError::input(format!(
            "{}: manifest has no clips",
            manifest_path.display()
        )));
    }

    let mut selected: Vec<&ManifestRow> = Vec::new();
    let mut taken = [0usize; 3];
    for row in &rows {
        if !wanted.contains(&row.split) {
            continue;
        }
        let slot = &mut taken[split_index(row.split)];
        if per_split_limit > 0 && *slot == per_split_limit {
            continue;
        }
        *slot += 1;
        selected.push(row);
    }
    if selected.is_empty() {
        return Err(CliError::input(format!(
            "{}: no clips in the requested splits",
            manifest_path.display()
        )));
    }

    let mut report = BuildReport {
        sets: SplitSets::default(),
        clips: [0; 3],
        skipped: Vec::new(),
    };
    for row in &selected {
        let path = row.resolve(manifest_path);
        let outcome = cwv::read_clip(&path)
            .map_err(|e| e.message)
            .and_then(|clip| {
                process_clip::<f32>(&clip, pipe).map_err(|e| {
                    format!("{}: {}", path.display(), e)
                })
            });
        match outcome {
            Ok(windows) => {
                let ds = report.sets.get_mut(row.split);
                for w in windows {
                    ds.push(w, row.slump_cm as f32).map_err(CliError::from)?;
                }
                report.clips[split_index(row.split)] += 1;
            }
            Err(reason) => {
                eprintln!("warning: skipping clip: {reason}");
                report.skipped.push((row.path.clone(), reason));
            }
        }
    }

    let allowed = (selected.len() / 10).max(1);
    if report.skipped.len() > allowed {
        return Err(CliError::input(format!(
            "{} of {} clips unusable (limit {}); first reason: {}",
            report.skipped.len(),
            selected.len(),
            allowed,
            report.skipped[0].1
        )));
    }
    Ok(report)
}

fn split_index(split: Split) -> usize {
    match split {
        Split::Train => 0,
        Split::Val => 1,
        Split::Test => 2,
    }
}

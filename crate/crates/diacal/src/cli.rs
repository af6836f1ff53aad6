//! Run configuration and the workflows behind the `diacal` binary.
//!
//! Every command reads a [`RunConfig`] (JSON file plus flag overrides),
//! loads posterior tracks (`*.pst1`) and reference annotations (`*.rttm`)
//! from the configured directories, and writes plot-ready CSV/JSON into the
//! output directory. Commands are idempotent: identical configuration and
//! inputs produce byte-identical outputs.

use std::collections::BTreeSet;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::adaptation::{
    emit_training_manifest, evaluate_minimal_validation, oracle_label, write_validation_csv,
    write_validation_summary_csv, CheckpointSet, ValidationConfig,
};
use crate::annotations::{parse_rttm, AnnotationSet, FrameGrid, DEFAULT_FRAME_RATE};
use crate::calibration::{
    adaptive_bin_edges, compute_ece, uniform_bin_edges, write_bin_csv, BinScheme, ScoredFrame,
};
use crate::der::{local_der, write_der_csv, DerBreakdown};
use crate::error::{Error, Result};
use crate::labels::{build_powerset_mapping, PowersetConfig, PowersetMapping};
use crate::posteriors::{read_posteriors, write_posteriors, PosteriorTrack};
use crate::selection::{
    budget_curves, select_regions, write_curves_csv, write_selection_manifest,
    write_whole_set_csv, SelectionStrategy, StrategyKind, DEFAULT_CANDIDATE_STRIDE,
    DEFAULT_REGION_LENGTH,
};
use crate::synth::{gen_posteriors, gen_reference, CalibrationProfile, ConversationParams};

/// One synthetic file of a scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthFile {
    pub file_id: String,
    pub duration: f64,
    #[serde(default = "default_speakers")]
    pub n_speakers: usize,
    #[serde(default = "default_turn_on")]
    pub turn_on_rate: f64,
    #[serde(default = "default_turn_off")]
    pub turn_off_rate: f64,
    #[serde(default)]
    pub overlap_bias: f64,
    pub seed: u64,
}

fn default_speakers() -> usize {
    2
}
fn default_turn_on() -> f64 {
    0.08
}
fn default_turn_off() -> f64 {
    0.25
}

/// Dataset description consumed by the `synth` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthScenario {
    #[serde(default = "default_frame_rate")]
    pub frame_rate: f64,
    #[serde(default = "default_window")]
    pub window_length: f32,
    #[serde(default = "default_window")]
    pub window_stride: f32,
    pub files: Vec<SynthFile>,
    #[serde(default)]
    pub profile: CalibrationProfile,
}

fn default_frame_rate() -> f64 {
    DEFAULT_FRAME_RATE
}
fn default_window() -> f32 {
    5.0
}

/// Full run configuration. Relative data directories resolve against
/// `dataset_root` when it is set.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub dataset_root: Option<PathBuf>,
    pub posterior_dir: PathBuf,
    pub rttm_dir: PathBuf,
    /// Directory holding one subdirectory of posterior tracks per
    /// checkpoint (for `ckpt-select`).
    pub checkpoint_dir: Option<PathBuf>,
    /// Checkpoint whose confidence scores validation candidates; defaults
    /// to the lexicographically first checkpoint.
    pub base_checkpoint: Option<String>,
    pub max_speakers: usize,
    pub max_simultaneous: usize,
    pub bins: usize,
    /// Use equal-population (adaptive) bins instead of uniform ones.
    pub adaptive_bins: bool,
    pub region_length: f64,
    pub stride: f64,
    /// Budget in seconds for `select`, `curves`, and `oracle-label`;
    /// the whole timeline when absent.
    pub budget: Option<f64>,
    /// Budget grid for `ckpt-select`.
    pub budgets: Vec<f64>,
    pub strategy: StrategyKind,
    pub seed: u64,
    pub n_trials: u32,
    pub out_dir: PathBuf,
    pub synth: Option<SynthScenario>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset_root: None,
            posterior_dir: PathBuf::from("posteriors"),
            rttm_dir: PathBuf::from("rttm"),
            checkpoint_dir: None,
            base_checkpoint: None,
            max_speakers: 3,
            max_simultaneous: 2,
            bins: 10,
            adaptive_bins: false,
            region_length: DEFAULT_REGION_LENGTH,
            stride: DEFAULT_CANDIDATE_STRIDE,
            budget: None,
            budgets: vec![30.0, 60.0, 150.0, 300.0, 600.0],
            strategy: StrategyKind::WorstConfidence,
            seed: 0,
            n_trials: 20,
            out_dir: PathBuf::from("out"),
            synth: None,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&fs::read(path)?)?)
    }

    fn resolve(&self, path: &Path) -> PathBuf {
        match (&self.dataset_root, path.is_relative()) {
            (Some(root), true) => root.join(path),
            _ => path.to_path_buf(),
        }
    }

    pub fn mapping(&self) -> Result<PowersetMapping> {
        Ok(build_powerset_mapping(PowersetConfig::new(
            self.max_speakers,
            self.max_simultaneous,
        )?))
    }

    fn bin_scheme(&self, confidences: &[f64], class_count: usize) -> Result<BinScheme> {
        if self.adaptive_bins {
            adaptive_bin_edges(confidences, class_count, self.bins)
        } else {
            uniform_bin_edges(class_count, self.bins)
        }
    }
}

fn sorted_files_with_extension(dir: &Path, extension: &str) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Err(Error::MissingInputs(format!(
            "directory {} does not exist",
            dir.display()
        )));
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|e| e == extension))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::MissingInputs(format!(
            "no *.{extension} files in {}",
            dir.display()
        )));
    }
    Ok(paths)
}

fn load_tracks_from(dir: &Path) -> Result<Vec<PosteriorTrack>> {
    sorted_files_with_extension(dir, "pst1")?
        .iter()
        .map(|p| read_posteriors(fs::File::open(p)?))
        .collect()
}

fn load_annotations_from(dir: &Path) -> Result<AnnotationSet> {
    let mut set = AnnotationSet::new();
    for path in sorted_files_with_extension(dir, "rttm")? {
        set.extend(parse_rttm(BufReader::new(fs::File::open(&path)?))?);
    }
    Ok(set)
}

/// Loads tracks and annotations and checks that every track has reference
/// annotations; missing files are reported together.
fn load_dataset(config: &RunConfig) -> Result<(Vec<PosteriorTrack>, AnnotationSet)> {
    let tracks = load_tracks_from(&config.resolve(&config.posterior_dir))?;
    let annotations = load_annotations_from(&config.resolve(&config.rttm_dir))?;
    let missing: Vec<&str> = tracks
        .iter()
        .map(|t| t.file_id.as_str())
        .filter(|id| !annotations.contains_file(id))
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingInputs(format!(
            "no reference annotations for: {}",
            missing.join(", ")
        )));
    }
    Ok((tracks, annotations))
}

fn out_path(config: &RunConfig, name: &str) -> Result<PathBuf> {
    fs::create_dir_all(&config.out_dir)?;
    Ok(config.out_dir.join(name))
}

fn total_timeline_seconds(tracks: &[PosteriorTrack]) -> f64 {
    tracks.iter().map(|t| t.grid.duration()).sum()
}

type DatasetScores = (Vec<(String, DerBreakdown)>, Vec<ScoredFrame>);

/// Scores every track and returns per-file results plus pooled frames.
fn score_dataset(
    tracks: &[PosteriorTrack],
    annotations: &AnnotationSet,
    mapping: &PowersetMapping,
) -> Result<DatasetScores> {
    let mut per_file = Vec::with_capacity(tracks.len());
    let mut frames = Vec::new();
    for track in tracks {
        let result = local_der(track, mapping, annotations)?;
        per_file.push((track.file_id.clone(), result.breakdown));
        frames.extend(result.frames);
    }
    Ok((per_file, frames))
}

/// `calibration`: per-dataset `ece,der` summary plus the per-bin CSV.
pub fn cmd_calibration(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let (tracks, annotations) = load_dataset(config)?;
    let mapping = config.mapping()?;
    let mut summary_rows: Vec<(String, f64, Option<f64>)> = Vec::new();
    let mut all_frames: Vec<ScoredFrame> = Vec::new();
    let mut all_breakdown = DerBreakdown::default();
    for track in &tracks {
        let result = local_der(track, &mapping, &annotations)?;
        let confidences: Vec<f64> = result.frames.iter().map(|f| f.confidence).collect();
        let scheme = config.bin_scheme(&confidences, mapping.num_classes())?;
        let report = compute_ece(&result.frames, &scheme)?;
        summary_rows.push((track.file_id.clone(), report.ece, result.breakdown.der()));
        all_breakdown.merge(result.breakdown);
        all_frames.extend(result.frames);
    }
    let confidences: Vec<f64> = all_frames.iter().map(|f| f.confidence).collect();
    let scheme = config.bin_scheme(&confidences, mapping.num_classes())?;
    let pooled = compute_ece(&all_frames, &scheme)?;

    let summary_path = out_path(config, "ece_summary.csv")?;
    let mut out = String::from("dataset,ece,der\n");
    for (id, ece, der) in &summary_rows {
        out.push_str(&format!(
            "{id},{ece:.6},{}\n",
            der.map_or(String::new(), |d| format!("{d:.6}"))
        ));
    }
    out.push_str(&format!(
        "ALL,{:.6},{}\n",
        pooled.ece,
        all_breakdown
            .der()
            .map_or(String::new(), |d| format!("{d:.6}"))
    ));
    fs::write(&summary_path, out)?;

    let bins_path = out_path(config, "reliability.csv")?;
    let mut bytes = Vec::new();
    write_bin_csv(&pooled.bins, &mut bytes)?;
    fs::write(&bins_path, bytes)?;
    Ok(vec![summary_path, bins_path])
}

/// `reliability`: the pooled per-bin CSV (reliability diagram and binwise
/// DER data).
pub fn cmd_reliability(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let (tracks, annotations) = load_dataset(config)?;
    let mapping = config.mapping()?;
    let (_, frames) = score_dataset(&tracks, &annotations, &mapping)?;
    let confidences: Vec<f64> = frames.iter().map(|f| f.confidence).collect();
    let scheme = config.bin_scheme(&confidences, mapping.num_classes())?;
    let report = compute_ece(&frames, &scheme)?;
    let path = out_path(config, "reliability.csv")?;
    let mut bytes = Vec::new();
    write_bin_csv(&report.bins, &mut bytes)?;
    fs::write(&path, bytes)?;
    Ok(vec![path])
}

/// `der`: per-file and total local DER breakdowns.
pub fn cmd_der(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let (tracks, annotations) = load_dataset(config)?;
    let mapping = config.mapping()?;
    let (per_file, _) = score_dataset(&tracks, &annotations, &mapping)?;
    let path = out_path(config, "der.csv")?;
    let mut bytes = Vec::new();
    write_der_csv(&per_file, &mut bytes)?;
    fs::write(&path, bytes)?;
    Ok(vec![path])
}

fn configured_strategy(config: &RunConfig) -> SelectionStrategy {
    SelectionStrategy {
        kind: config.strategy,
        seed: config.seed,
        region_length: config.region_length,
        stride: config.stride,
    }
}

/// `select`: budgeted region selection written as a JSON-lines manifest.
pub fn cmd_select(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let tracks = load_tracks_from(&config.resolve(&config.posterior_dir))?;
    let refs: Vec<&PosteriorTrack> = tracks.iter().collect();
    let budget = config
        .budget
        .unwrap_or_else(|| total_timeline_seconds(&tracks));
    let selection = select_regions(&refs, &configured_strategy(config), budget)?;
    if selection.shortfall {
        log::warn!(
            "budget {:.1}s exceeds selectable duration; selected {:.1}s",
            selection.requested_seconds,
            selection.selected_seconds
        );
    }
    let path = out_path(config, "selection.jsonl")?;
    let mut bytes = Vec::new();
    write_selection_manifest(&selection, &mut bytes)?;
    fs::write(&path, bytes)?;
    Ok(vec![path])
}

/// `curves`: cumulative DER and composition along the selection order, plus
/// the whole-set baseline.
pub fn cmd_curves(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let (tracks, annotations) = load_dataset(config)?;
    let mapping = config.mapping()?;
    let refs: Vec<&PosteriorTrack> = tracks.iter().collect();
    let budget = config
        .budget
        .unwrap_or_else(|| total_timeline_seconds(&tracks));
    let selection = select_regions(&refs, &configured_strategy(config), budget)?;
    let curves = budget_curves(&selection.regions, &annotations, &refs, &mapping)?;
    let curves_path = out_path(config, "curves.csv")?;
    let mut bytes = Vec::new();
    write_curves_csv(&curves, &mut bytes)?;
    fs::write(&curves_path, bytes)?;
    let whole_path = out_path(config, "whole_set.csv")?;
    let mut bytes = Vec::new();
    write_whole_set_csv(&curves, total_timeline_seconds(&tracks), &mut bytes)?;
    fs::write(&whole_path, bytes)?;
    Ok(vec![curves_path, whole_path])
}

/// `oracle-label`: select regions, reveal the withheld annotations inside
/// them, and emit the training manifest.
pub fn cmd_oracle_label(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let (tracks, annotations) = load_dataset(config)?;
    let refs: Vec<&PosteriorTrack> = tracks.iter().collect();
    let budget = config
        .budget
        .unwrap_or_else(|| total_timeline_seconds(&tracks));
    let selection = select_regions(&refs, &configured_strategy(config), budget)?;
    let result = oracle_label(&selection.regions, &annotations)?;
    emit_training_manifest(&result, &config.out_dir)
}

/// `ckpt-select`: minimal-validation checkpoint selection over the budget
/// grid, with random and worst-confidence strategies side by side.
pub fn cmd_ckpt_select(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let ckpt_dir = config
        .checkpoint_dir
        .as_ref()
        .ok_or(Error::MissingInputs("checkpoint_dir is not set".into()))?;
    let ckpt_dir = config.resolve(ckpt_dir);
    if !ckpt_dir.is_dir() {
        return Err(Error::MissingInputs(format!(
            "checkpoint directory {} does not exist",
            ckpt_dir.display()
        )));
    }
    let mut subdirs: Vec<PathBuf> = fs::read_dir(&ckpt_dir)?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.is_dir())
        .collect();
    subdirs.sort();
    if subdirs.is_empty() {
        return Err(Error::MissingInputs(format!(
            "no checkpoint subdirectories in {}",
            ckpt_dir.display()
        )));
    }
    let mut entries = Vec::with_capacity(subdirs.len());
    for dir in &subdirs {
        let id = dir
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| Error::InvalidConfig("non-UTF-8 checkpoint name".into()))?;
        entries.push((id.to_string(), load_tracks_from(dir)?));
    }
    let checkpoints = CheckpointSet::new(entries)?;
    let annotations = load_annotations_from(&config.resolve(&config.rttm_dir))?;
    let mapping = config.mapping()?;
    let base = match &config.base_checkpoint {
        Some(id) => id.clone(),
        None => checkpoints.ids().next().expect("non-empty set").to_string(),
    };
    let validation = ValidationConfig {
        budgets: config.budgets.clone(),
        strategies: vec![StrategyKind::Random, StrategyKind::WorstConfidence],
        n_trials: config.n_trials,
        base_checkpoint: base,
        region_length: config.region_length,
        stride: config.stride,
        seed: config.seed,
    };
    let report = evaluate_minimal_validation(&checkpoints, &annotations, &mapping, &validation)?;
    let report_path = out_path(config, "ckpt_report.csv")?;
    let mut bytes = Vec::new();
    write_validation_csv(&report, &mut bytes)?;
    fs::write(&report_path, bytes)?;
    let summary_path = out_path(config, "ckpt_summary.csv")?;
    let mut bytes = Vec::new();
    write_validation_summary_csv(&report, &mut bytes)?;
    fs::write(&summary_path, bytes)?;
    Ok(vec![report_path, summary_path])
}

/// `synth`: generate the scenario's RTTM and PST1 files under the output
/// directory (`rttm/` and `posteriors/`).
pub fn cmd_synth(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let scenario = config
        .synth
        .as_ref()
        .ok_or(Error::MissingInputs("synth scenario is not set".into()))?;
    if scenario.files.is_empty() {
        return Err(Error::EmptyInput("synth scenario files"));
    }
    let ids: BTreeSet<&str> = scenario.files.iter().map(|f| f.file_id.as_str()).collect();
    if ids.len() != scenario.files.len() {
        return Err(Error::InvalidConfig("duplicate synth file ids".into()));
    }
    for id in &ids {
        let ok = !id.is_empty()
            && id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
        if !ok {
            return Err(Error::InvalidConfig(format!(
                "file id {id:?} is not filesystem-safe"
            )));
        }
    }
    let mapping = config.mapping()?;
    let rttm_dir = config.out_dir.join("rttm");
    let pst_dir = config.out_dir.join("posteriors");
    fs::create_dir_all(&rttm_dir)?;
    fs::create_dir_all(&pst_dir)?;
    let mut outputs = Vec::new();
    for file in &scenario.files {
        let params = ConversationParams {
            file_id: file.file_id.clone(),
            n_speakers: file.n_speakers,
            duration: file.duration,
            turn_on_rate: file.turn_on_rate,
            turn_off_rate: file.turn_off_rate,
            overlap_bias: file.overlap_bias,
            seed: file.seed,
        };
        let reference = gen_reference(&params, scenario.frame_rate)?;
        let grid = FrameGrid::for_duration(scenario.frame_rate, file.duration)?;
        let track = gen_posteriors(
            &reference,
            &file.file_id,
            &mapping,
            &scenario.profile,
            &grid,
            scenario.window_length,
            scenario.window_stride,
            file.seed.wrapping_add(0x9E37_79B9),
        )?;
        let rttm_path = rttm_dir.join(format!("{}.rttm", file.file_id));
        let mut rttm_bytes = Vec::new();
        crate::annotations::write_rttm(&reference, &mut rttm_bytes)?;
        fs::write(&rttm_path, rttm_bytes)?;
        let pst_path = pst_dir.join(format!("{}.pst1", file.file_id));
        let mut pst_bytes = Vec::new();
        write_posteriors(&track, &mut pst_bytes)?;
        fs::write(&pst_path, pst_bytes)?;
        outputs.push(rttm_path);
        outputs.push(pst_path);
    }
    Ok(outputs)
}

//! Annotation-efficient domain adaptation: oracle labeling of selected
//! regions, training-manifest emission, and checkpoint selection from
//! minimal validation subsets.
//!
//! Retraining itself stays out of scope: the harness produces the exact
//! inputs a retraining run would consume (regions plus clipped reference
//! annotations) and evaluates fixed checkpoint sets through their posterior
//! tracks.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::annotations::{write_rttm, AnnotationSet, SegmentAnnotation};
use crate::der::{local_der, DerBreakdown};
use crate::error::{Error, Result};
use crate::labels::PowersetMapping;
use crate::posteriors::PosteriorTrack;
use crate::selection::{select_regions, Region, SelectionStrategy, StrategyKind};

/// The outcome of simulated annotation: withheld reference segments clipped
/// to the selected regions.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleLabelResult {
    pub regions: Vec<Region>,
    /// Segments intersected with the regions and split at region
    /// boundaries; segments outside every region are dropped.
    pub annotations: AnnotationSet,
    /// Sum of region durations in seconds.
    pub total_annotated: f64,
}

/// Reveals the withheld annotations inside the selected regions.
pub fn oracle_label(selected: &[Region], withheld: &AnnotationSet) -> Result<OracleLabelResult> {
    let mut annotations = AnnotationSet::new();
    let mut total = 0.0f64;
    for region in selected {
        if !withheld.contains_file(&region.file_id) {
            return Err(Error::UnknownFile(region.file_id.clone()));
        }
        total += region.duration();
        for seg in withheld.for_file(&region.file_id) {
            let lo = seg.start.max(region.start);
            let hi = seg.end().min(region.end);
            if hi - lo > 1e-9 {
                annotations.push(SegmentAnnotation::new(
                    &seg.file_id,
                    &seg.speaker,
                    lo,
                    hi - lo,
                )?);
            }
        }
    }
    Ok(OracleLabelResult {
        regions: selected.to_vec(),
        annotations,
        total_annotated: total,
    })
}

/// The JSON side of an emitted training manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingManifest {
    pub total_seconds: f64,
    /// Regions sorted by `(file_id, start)`.
    pub regions: Vec<Region>,
    /// RTTM file holding the clipped annotations, relative to the manifest.
    pub annotations_rttm: String,
}

/// Writes `manifest.json` and `annotations.rttm` into `out_dir`, both with
/// deterministic `(file_id, start)` ordering. Returns the written paths.
pub fn emit_training_manifest(
    result: &OracleLabelResult,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut regions = result.regions.clone();
    regions.sort_by(|a, b| {
        a.file_id
            .cmp(&b.file_id)
            .then_with(|| a.start.total_cmp(&b.start))
    });
    let mut segments: Vec<SegmentAnnotation> = result.annotations.segments().to_vec();
    segments.sort_by(|a, b| {
        a.file_id
            .cmp(&b.file_id)
            .then_with(|| a.start.total_cmp(&b.start))
            .then_with(|| a.speaker.cmp(&b.speaker))
    });

    let rttm_path = out_dir.join("annotations.rttm");
    let mut rttm_bytes = Vec::new();
    write_rttm(&AnnotationSet::from_segments(segments), &mut rttm_bytes)?;
    fs::write(&rttm_path, rttm_bytes)?;

    let manifest = TrainingManifest {
        total_seconds: result.total_annotated,
        regions,
        annotations_rttm: "annotations.rttm".to_string(),
    };
    let manifest_path = out_dir.join("manifest.json");
    let mut json = serde_json::to_vec_pretty(&manifest)?;
    json.push(b'\n');
    fs::write(&manifest_path, json)?;
    Ok(vec![manifest_path, rttm_path])
}

/// Reads a training manifest back.
pub fn read_training_manifest(path: &Path) -> Result<TrainingManifest> {
    Ok(serde_json::from_slice(&fs::read(path)?)?)
}

/// A fixed set of model checkpoints, each represented by its posterior
/// tracks over one shared validation domain.
#[derive(Debug, Clone)]
pub struct CheckpointSet {
    /// `(checkpoint_id, tracks sorted by file_id)`, sorted by id.
    entries: Vec<(String, Vec<PosteriorTrack>)>,
}

impl CheckpointSet {
    /// Validates that every checkpoint covers the same files on identical
    /// grids with identical class counts.
    pub fn new(mut entries: Vec<(String, Vec<PosteriorTrack>)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyInput("checkpoint set"));
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        for pair in entries.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::InvalidConfig(format!(
                    "duplicate checkpoint id {:?}",
                    pair[0].0
                )));
            }
        }
        for (_, tracks) in &mut entries {
            tracks.sort_by(|a, b| a.file_id.cmp(&b.file_id));
        }
        let signature = |tracks: &[PosteriorTrack]| -> Vec<(String, usize, u64, usize)> {
            tracks
                .iter()
                .map(|t| {
                    (
                        t.file_id.clone(),
                        t.num_frames(),
                        t.grid.frame_rate.to_bits(),
                        t.num_classes,
                    )
                })
                .collect()
        };
        let first = signature(&entries[0].1);
        if first.is_empty() {
            return Err(Error::EmptyInput("checkpoint tracks"));
        }
        for (id, tracks) in &entries[1..] {
            if signature(tracks) != first {
                return Err(Error::InvalidConfig(format!(
                    "checkpoint {id:?} does not cover the same files and grids as {:?}",
                    entries[0].0
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(id, _)| id.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn tracks(&self, id: &str) -> Option<&[PosteriorTrack]> {
        self.entries
            .iter()
            .find(|(e, _)| e == id)
            .map(|(_, t)| t.as_slice())
    }

    fn iter(&self) -> impl Iterator<Item = (&str, &[PosteriorTrack])> {
        self.entries
            .iter()
            .map(|(id, tracks)| (id.as_str(), tracks.as_slice()))
    }
}

/// Per-checkpoint, per-file frame contributions, cached so that region
/// subsets can be re-scored without recomputing the alignment.
struct ScoredCheckpoints {
    /// checkpoint -> file -> per-timeline-frame counts.
    counts: Vec<(String, BTreeMap<String, Vec<crate::calibration::FrameErrorCounts>>)>,
    /// checkpoint -> full-set breakdown.
    full: Vec<(String, DerBreakdown)>,
}

fn score_checkpoints(
    checkpoints: &CheckpointSet,
    reference: &AnnotationSet,
    mapping: &PowersetMapping,
) -> Result<ScoredCheckpoints> {
    let mut counts = Vec::with_capacity(checkpoints.len());
    let mut full = Vec::with_capacity(checkpoints.len());
    for (id, tracks) in checkpoints.iter() {
        let mut per_file = BTreeMap::new();
        let mut breakdown = DerBreakdown::default();
        for track in tracks {
            let result = local_der(track, mapping, reference)?;
            breakdown.merge(result.breakdown);
            let mut frame_counts =
                vec![crate::calibration::FrameErrorCounts::default(); track.num_frames()];
            for f in &result.frames {
                let c = f.counts.expect("local_der always attaches counts");
                let slot = &mut frame_counts[f.timeline_frame];
                slot.false_alarm += c.false_alarm;
                slot.missed += c.missed;
                slot.confusion += c.confusion;
                slot.speech += c.speech;
            }
            per_file.insert(track.file_id.clone(), frame_counts);
        }
        counts.push((id.to_string(), per_file));
        full.push((id.to_string(), breakdown));
    }
    Ok(ScoredCheckpoints { counts, full })
}

/// Frame masks per file for a region list.
fn region_masks(
    regions: &[Region],
    checkpoints: &CheckpointSet,
) -> Result<BTreeMap<String, Vec<bool>>> {
    let (_, reference_tracks) = &checkpoints.entries[0];
    let mut masks: BTreeMap<String, Vec<bool>> = reference_tracks
        .iter()
        .map(|t| (t.file_id.clone(), vec![false; t.num_frames()]))
        .collect();
    for region in regions {
        let track = reference_tracks
            .iter()
            .find(|t| t.file_id == region.file_id)
            .ok_or_else(|| Error::UnknownFile(region.file_id.clone()))?;
        let mask = masks.get_mut(&region.file_id).expect("mask exists");
        for t in track.grid.frames_within(region.start, region.end) {
            mask[t] = true;
        }
    }
    Ok(masks)
}

fn restricted_breakdown(
    per_file: &BTreeMap<String, Vec<crate::calibration::FrameErrorCounts>>,
    masks: &BTreeMap<String, Vec<bool>>,
) -> DerBreakdown {
    let mut breakdown = DerBreakdown::default();
    for (file_id, mask) in masks {
        if let Some(counts) = per_file.get(file_id) {
            for (c, &selected) in counts.iter().zip(mask) {
                if selected {
                    breakdown.add_frame(*c);
                }
            }
        }
    }
    breakdown
}

/// Rank value for checkpoint comparison: undefined DER sorts last.
fn der_rank(b: &DerBreakdown) -> f64 {
    b.der().unwrap_or(f64::INFINITY)
}

/// Picks the checkpoint minimizing local DER restricted to the frames
/// inside `regions`; ties go to the lexicographically smallest id.
pub fn select_checkpoint(
    checkpoints: &CheckpointSet,
    reference: &AnnotationSet,
    regions: &[Region],
    mapping: &PowersetMapping,
) -> Result<String> {
    if regions.is_empty() {
        return Err(Error::EmptyInput("validation regions"));
    }
    let scored = score_checkpoints(checkpoints, reference, mapping)?;
    let masks = region_masks(regions, checkpoints)?;
    let best = scored
        .counts
        .iter()
        .map(|(id, per_file)| (id, der_rank(&restricted_breakdown(per_file, &masks))))
        .min_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(b.0)))
        .expect("checkpoint set is non-empty");
    Ok(best.0.clone())
}

/// Parameters of a minimal-validation evaluation run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationConfig {
    /// Budgets in seconds, evaluated in order.
    pub budgets: Vec<f64>,
    pub strategies: Vec<StrategyKind>,
    /// Trials per random budget point; confidence-based selection is
    /// deterministic and runs once.
    pub n_trials: u32,
    /// Checkpoint whose posteriors score the candidate confidence.
    pub base_checkpoint: String,
    pub region_length: f64,
    pub stride: f64,
    pub seed: u64,
}

/// One selection trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationTrialRow {
    pub budget_s: f64,
    pub strategy: StrategyKind,
    pub trial: u32,
    pub selected_ckpt: String,
    /// Full-set DER of the selected checkpoint.
    pub der_selected: f64,
    /// Full-set DER of the true best checkpoint.
    pub der_best: f64,
    /// `(der_selected - der_best) / der_best`, always >= 0.
    pub rel_diff: f64,
    /// True when the budget exceeded the selectable duration.
    pub shortfall: bool,
}

/// Mean/max relative difference over the trials of one budget x strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationSummaryRow {
    pub budget_s: f64,
    pub strategy: StrategyKind,
    pub trials: u32,
    pub mean_rel_diff: f64,
    pub max_rel_diff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationEvalReport {
    pub best_checkpoint: String,
    pub der_best: f64,
    pub rows: Vec<ValidationTrialRow>,
    pub summary: Vec<ValidationSummaryRow>,
}

/// Runs the full budget x strategy grid: select validation regions (scored
/// on the base checkpoint's confidence), pick the best checkpoint on the
/// subset, and compare its full-set DER against the true best.
pub fn evaluate_minimal_validation(
    checkpoints: &CheckpointSet,
    reference: &AnnotationSet,
    mapping: &PowersetMapping,
    config: &ValidationConfig,
) -> Result<ValidationEvalReport> {
    if config.n_trials == 0 {
        return Err(Error::InvalidConfig("n_trials must be >= 1".into()));
    }
    let base_tracks = checkpoints
        .tracks(&config.base_checkpoint)
        .ok_or_else(|| Error::UnknownFile(config.base_checkpoint.clone()))?;
    let base_refs: Vec<&PosteriorTrack> = base_tracks.iter().collect();

    let scored = score_checkpoints(checkpoints, reference, mapping)?;
    let (best_checkpoint, der_best) = scored
        .full
        .iter()
        .map(|(id, b)| (id.clone(), der_rank(b)))
        .min_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)))
        .expect("checkpoint set is non-empty");
    let full_der: BTreeMap<&str, f64> = scored
        .full
        .iter()
        .map(|(id, b)| (id.as_str(), der_rank(b)))
        .collect();

    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &budget in &config.budgets {
        for &strategy_kind in &config.strategies {
            let n_trials = match strategy_kind {
                StrategyKind::WorstConfidence => 1,
                StrategyKind::Random => config.n_trials,
            };
            let mut rel_diffs = Vec::with_capacity(n_trials as usize);
            for trial in 0..n_trials {
                let strategy = SelectionStrategy {
                    kind: strategy_kind,
                    seed: config.seed.wrapping_add(u64::from(trial)),
                    region_length: config.region_length,
                    stride: config.stride,
                };
                let selection = select_regions(&base_refs, &strategy, budget)?;
                if selection.regions.is_empty() {
                    return Err(Error::InvalidConfig(format!(
                        "no selectable regions for budget {budget}"
                    )));
                }
                let masks = region_masks(&selection.regions, checkpoints)?;
                let selected = scored
                    .counts
                    .iter()
                    .map(|(id, per_file)| {
                        (id.as_str(), der_rank(&restricted_breakdown(per_file, &masks)))
                    })
                    .min_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(b.0)))
                    .expect("checkpoint set is non-empty")
                    .0;
                let der_selected = full_der[selected];
                let rel_diff = if der_best > 0.0 {
                    (der_selected - der_best) / der_best
                } else if der_selected > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                };
                rel_diffs.push(rel_diff);
                rows.push(ValidationTrialRow {
                    budget_s: budget,
                    strategy: strategy_kind,
                    trial,
                    selected_ckpt: selected.to_string(),
                    der_selected,
                    der_best,
                    rel_diff,
                    shortfall: selection.shortfall,
                });
            }
            summary.push(ValidationSummaryRow {
                budget_s: budget,
                strategy: strategy_kind,
                trials: n_trials,
                mean_rel_diff: rel_diffs.iter().sum::<f64>() / rel_diffs.len() as f64,
                max_rel_diff: rel_diffs.iter().copied().fold(0.0, f64::max),
            });
        }
    }
    Ok(ValidationEvalReport {
        best_checkpoint,
        der_best,
        rows,
        summary,
    })
}

/// Writes trial rows as the
/// `budget_s,strategy,trial,selected_ckpt,der_selected,der_best,rel_diff` CSV.
pub fn write_validation_csv<W: std::io::Write>(
    report: &ValidationEvalReport,
    mut writer: W,
) -> std::io::Result<()> {
    writeln!(
        writer,
        "budget_s,strategy,trial,selected_ckpt,der_selected,der_best,rel_diff"
    )?;
    for row in &report.rows {
        writeln!(
            writer,
            "{:.6},{},{},{},{:.6},{:.6},{:.6}",
            row.budget_s,
            row.strategy,
            row.trial,
            row.selected_ckpt,
            row.der_selected,
            row.der_best,
            row.rel_diff
        )?;
    }
    Ok(())
}

/// Writes the per-budget summary CSV.
pub fn write_validation_summary_csv<W: std::io::Write>(
    report: &ValidationEvalReport,
    mut writer: W,
) -> std::io::Result<()> {
    writeln!(writer, "budget_s,strategy,trials,mean_rel_diff,max_rel_diff")?;
    for row in &report.summary {
        writeln!(
            writer,
            "{:.6},{},{},{:.6},{:.6}",
            row.budget_s, row.strategy, row.trials, row.mean_rel_diff, row.max_rel_diff
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotations::FrameGrid;
    use crate::labels::{build_powerset_mapping, PowersetConfig};

    fn region(file_id: &str, start: f64, end: f64) -> Region {
        Region {
            file_id: file_id.into(),
            start,
            end,
        }
    }

    #[test]
    fn empty_region_list_yields_empty_annotations() {
        let mut withheld = AnnotationSet::new();
        withheld.push(SegmentAnnotation::new("f", "a", 0.0, 5.0).unwrap());
        let result = oracle_label(&[], &withheld).unwrap();
        assert!(result.annotations.is_empty());
        assert_eq!(result.total_annotated, 0.0);
    }

    #[test]
    fn fully_contained_segments_pass_through_unchanged() {
        let mut withheld = AnnotationSet::new();
        withheld.push(SegmentAnnotation::new("f", "a", 2.0, 3.0).unwrap());
        let result = oracle_label(&[region("f", 0.0, 10.0)], &withheld).unwrap();
        assert_eq!(result.annotations.segments(), withheld.segments());
        assert!((result.total_annotated - 10.0).abs() < 1e-12);
    }

    #[test]
    fn segments_are_clipped_to_region_boundaries() {
        // Segment [3, 12] clipped by region [5, 10] -> [5, 10].
        let mut withheld = AnnotationSet::new();
        withheld.push(SegmentAnnotation::new("f", "a", 3.0, 9.0).unwrap());
        let result = oracle_label(&[region("f", 5.0, 10.0)], &withheld).unwrap();
        assert_eq!(result.annotations.len(), 1);
        let seg = &result.annotations.segments()[0];
        assert!((seg.start - 5.0).abs() < 1e-12);
        assert!((seg.end() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn segments_outside_every_region_are_dropped() {
        let mut withheld = AnnotationSet::new();
        withheld.push(SegmentAnnotation::new("f", "a", 0.0, 2.0).unwrap());
        withheld.push(SegmentAnnotation::new("f", "b", 8.0, 2.0).unwrap());
        let result = oracle_label(&[region("f", 3.0, 6.0)], &withheld).unwrap();
        assert!(result.annotations.is_empty());
    }

    #[test]
    fn oracle_never_fabricates_speech() {
        let mut withheld = AnnotationSet::new();
        withheld.push(SegmentAnnotation::new("f", "a", 1.0, 4.0).unwrap());
        withheld.push(SegmentAnnotation::new("f", "b", 3.5, 3.0).unwrap());
        let regions = [region("f", 0.0, 4.0), region("f", 5.0, 9.0)];
        let result = oracle_label(&regions, &withheld).unwrap();
        for seg in result.annotations.segments() {
            let inside_a_region = regions
                .iter()
                .any(|r| seg.start >= r.start - 1e-9 && seg.end() <= r.end + 1e-9);
            assert!(inside_a_region, "{seg:?} escapes the selected regions");
            let covered_by_reference = withheld.for_file("f").any(|w| {
                w.speaker == seg.speaker
                    && seg.start >= w.start - 1e-9
                    && seg.end() <= w.end() + 1e-9
            });
            assert!(covered_by_reference, "{seg:?} not in the withheld set");
        }
    }

    #[test]
    fn unknown_file_is_rejected() {
        let withheld = AnnotationSet::new();
        match oracle_label(&[region("ghost", 0.0, 1.0)], &withheld) {
            Err(Error::UnknownFile(id)) => assert_eq!(id, "ghost"),
            other => panic!("expected UnknownFile, got {other:?}"),
        }
    }

    #[test]
    fn manifest_round_trips_regions_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let mut withheld = AnnotationSet::new();
        withheld.push(SegmentAnnotation::new("f", "a", 0.4, 9.0).unwrap());
        let regions = [region("f", 7.5, 15.0), region("f", 0.0, 7.5)];
        let result = oracle_label(&regions, &withheld).unwrap();
        let paths = emit_training_manifest(&result, dir.path()).unwrap();
        assert_eq!(paths.len(), 2);
        let manifest = read_training_manifest(&paths[0]).unwrap();
        assert_eq!(manifest.total_seconds, 15.0);
        // Regions come back sorted by (file_id, start).
        assert_eq!(
            manifest.regions,
            vec![region("f", 0.0, 7.5), region("f", 7.5, 15.0)]
        );
        // The RTTM next to it parses back to the clipped segments.
        let rttm = std::fs::read(&paths[1]).unwrap();
        let parsed = crate::annotations::parse_rttm(rttm.as_slice()).unwrap();
        assert_eq!(parsed.len(), result.annotations.len());
    }

    #[test]
    fn standard_budgets_produce_manifests_of_matching_durations() {
        use crate::annotations::FrameGrid;
        use crate::posteriors::PosteriorTrack;
        use crate::selection::{select_regions, SelectionStrategy};
        // Two 700 s files at 4 fps: 7.5 s regions are exactly 30 frames.
        let tracks: Vec<PosteriorTrack> = ["m0", "m1"]
            .iter()
            .map(|id| {
                let rows: Vec<f32> = (0..2800).flat_map(|_| [0.7, 0.3]).collect();
                PosteriorTrack::new(id, FrameGrid::new(4.0, 2800).unwrap(), 2, rows, 5.0, 5.0)
                    .unwrap()
            })
            .collect();
        let refs: Vec<&PosteriorTrack> = tracks.iter().collect();
        let mut withheld = AnnotationSet::new();
        withheld.push(SegmentAnnotation::new("m0", "a", 0.0, 700.0).unwrap());
        withheld.push(SegmentAnnotation::new("m1", "a", 0.0, 700.0).unwrap());
        for budget in [30.0, 150.0, 1200.0] {
            let selection =
                select_regions(&refs, &SelectionStrategy::worst_confidence(), budget).unwrap();
            assert!(!selection.shortfall);
            let result = oracle_label(&selection.regions, &withheld).unwrap();
            assert!(
                (result.total_annotated - budget).abs() < 1e-9,
                "budget {budget}: annotated {}",
                result.total_annotated
            );
            let dir = tempfile::tempdir().unwrap();
            let paths = emit_training_manifest(&result, dir.path()).unwrap();
            let manifest = read_training_manifest(&paths[0]).unwrap();
            assert!((manifest.total_seconds - budget).abs() < 1e-9);
        }
    }

    /// A tiny two-class checkpoint whose DER is controlled by how many
    /// frames it predicts wrong.
    fn fixture_checkpoint(wrong_frames: usize, num_frames: usize) -> Vec<PosteriorTrack> {
        let rows: Vec<f32> = (0..num_frames)
            .flat_map(|t| {
                if t < wrong_frames {
                    [0.9, 0.1] // predicts silence although speech is there
                } else {
                    [0.1, 0.9]
                }
            })
            .collect();
        vec![PosteriorTrack::new(
            "v",
            FrameGrid::new(10.0, num_frames).unwrap(),
            2,
            rows,
            5.0,
            5.0,
        )
        .unwrap()]
    }

    fn fixture_reference() -> AnnotationSet {
        let mut set = AnnotationSet::new();
        set.push(SegmentAnnotation::new("v", "a", 0.0, 30.0).unwrap());
        set
    }

    #[test]
    fn checkpoint_set_validates_coverage() {
        let a = fixture_checkpoint(0, 300);
        let b = fixture_checkpoint(10, 300);
        assert!(CheckpointSet::new(vec![("a".into(), a.clone()), ("b".into(), b)]).is_ok());
        let mismatched = fixture_checkpoint(0, 200);
        match CheckpointSet::new(vec![("a".into(), a), ("b".into(), mismatched)]) {
            Err(Error::InvalidConfig(_)) => {}
            other => panic!("expected InvalidConfig, got {other:?}"),
        }
    }

    #[test]
    fn full_coverage_selects_the_known_best_checkpoint() {
        let mapping = build_powerset_mapping(PowersetConfig::new(1, 1).unwrap());
        // Known DER ordering: ckpt2 (5 wrong) < ckpt0 (20) < ckpt1 (40).
        let set = CheckpointSet::new(vec![
            ("ckpt0".into(), fixture_checkpoint(20, 300)),
            ("ckpt1".into(), fixture_checkpoint(40, 300)),
            ("ckpt2".into(), fixture_checkpoint(5, 300)),
        ])
        .unwrap();
        let reference = fixture_reference();
        let best = select_checkpoint(
            &set,
            &reference,
            &[region("v", 0.0, 30.0)],
            &mapping,
        )
        .unwrap();
        assert_eq!(best, "ckpt2");
    }

    #[test]
    fn single_checkpoint_is_always_selected() {
        let mapping = build_powerset_mapping(PowersetConfig::new(1, 1).unwrap());
        let set = CheckpointSet::new(vec![("only".into(), fixture_checkpoint(7, 300))]).unwrap();
        let best = select_checkpoint(
            &set,
            &fixture_reference(),
            &[region("v", 0.0, 30.0)],
            &mapping,
        )
        .unwrap();
        assert_eq!(best, "only");
    }

    #[test]
    fn identical_checkpoints_tie_to_the_smallest_id() {
        let mapping = build_powerset_mapping(PowersetConfig::new(1, 1).unwrap());
        let set = CheckpointSet::new(vec![
            ("zeta".into(), fixture_checkpoint(10, 300)),
            ("alpha".into(), fixture_checkpoint(10, 300)),
        ])
        .unwrap();
        let best = select_checkpoint(
            &set,
            &fixture_reference(),
            &[region("v", 0.0, 30.0)],
            &mapping,
        )
        .unwrap();
        assert_eq!(best, "alpha");
    }

    #[test]
    fn empty_region_list_is_an_error() {
        let mapping = build_powerset_mapping(PowersetConfig::new(1, 1).unwrap());
        let set = CheckpointSet::new(vec![("a".into(), fixture_checkpoint(0, 300))]).unwrap();
        assert!(select_checkpoint(&set, &fixture_reference(), &[], &mapping).is_err());
    }

    #[test]
    fn full_budget_validation_reports_zero_relative_difference() {
        let mapping = build_powerset_mapping(PowersetConfig::new(1, 1).unwrap());
        let set = CheckpointSet::new(vec![
            ("ckpt0".into(), fixture_checkpoint(5, 300)),
            ("ckpt1".into(), fixture_checkpoint(60, 300)),
        ])
        .unwrap();
        let config = ValidationConfig {
            budgets: vec![30.0],
            strategies: vec![StrategyKind::WorstConfidence, StrategyKind::Random],
            n_trials: 3,
            base_checkpoint: "ckpt0".into(),
            region_length: 7.5,
            stride: 2.5,
            seed: 1,
        };
        let report =
            evaluate_minimal_validation(&set, &fixture_reference(), &mapping, &config).unwrap();
        assert_eq!(report.best_checkpoint, "ckpt0");
        assert_eq!(report.rows.len(), 1 + 3);
        for row in &report.rows {
            assert_eq!(row.selected_ckpt, "ckpt0");
            assert_eq!(row.rel_diff, 0.0);
            assert!(row.rel_diff >= 0.0);
        }
        for s in &report.summary {
            assert_eq!(s.mean_rel_diff, 0.0);
        }
    }

    #[test]
    fn validation_csv_has_the_documented_schema() {
        let report = ValidationEvalReport {
            best_checkpoint: "b".into(),
            der_best: 0.25,
            rows: vec![ValidationTrialRow {
                budget_s: 30.0,
                strategy: StrategyKind::Random,
                trial: 2,
                selected_ckpt: "b".into(),
                der_selected: 0.25,
                der_best: 0.25,
                rel_diff: 0.0,
                shortfall: false,
            }],
            summary: vec![ValidationSummaryRow {
                budget_s: 30.0,
                strategy: StrategyKind::Random,
                trials: 3,
                mean_rel_diff: 0.1,
                max_rel_diff: 0.3,
            }],
        };
        let mut out = Vec::new();
        write_validation_csv(&report, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with(
            "budget_s,strategy,trial,selected_ckpt,der_selected,der_best,rel_diff\n"
        ));
        assert!(text.contains("30.000000,random,2,b,0.250000,0.250000,0.000000"));
    }
}

//! Annotation-region selection under a time budget, and the budget curves
//! describing what the selected data contains.
//!
//! Candidates are fixed-length sliding regions scored by mean top-label
//! confidence. The worst-confidence strategy takes the lowest-scored
//! non-overlapping candidates first; the random strategy is the seeded
//! baseline. Budget curves then report how cumulative DER and the
//! nonspeech/speech/overlap composition evolve as the budget grows.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::annotations::{rasterize_full, AnnotationSet};
use crate::calibration::FrameErrorCounts;
use crate::der::{local_der, DerBreakdown};
use crate::error::{Error, Result};
use crate::labels::PowersetMapping;
use crate::posteriors::PosteriorTrack;

/// A contiguous selected span of one file, snapped to frame boundaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub file_id: String,
    pub start: f64,
    pub end: f64,
}

impl Region {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    pub fn overlaps(&self, other: &Region) -> bool {
        self.file_id == other.file_id && self.start < other.end && other.start < self.end
    }
}

/// Which ordering drives the greedy selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    /// Lowest mean-confidence candidates first.
    WorstConfidence,
    /// Seeded uniform shuffle of the candidates.
    Random,
}

impl std::fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StrategyKind::WorstConfidence => write!(f, "worst-confidence"),
            StrategyKind::Random => write!(f, "random"),
        }
    }
}

/// Selection parameters. Regions default to 7.5 s, sampled every 2.5 s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionStrategy {
    pub kind: StrategyKind,
    /// Only used by [`StrategyKind::Random`].
    pub seed: u64,
    /// Region length in seconds.
    pub region_length: f64,
    /// Distance between candidate starts in seconds.
    pub stride: f64,
}

pub const DEFAULT_REGION_LENGTH: f64 = 7.5;
pub const DEFAULT_CANDIDATE_STRIDE: f64 = 2.5;

impl SelectionStrategy {
    pub fn worst_confidence() -> Self {
        Self {
            kind: StrategyKind::WorstConfidence,
            seed: 0,
            region_length: DEFAULT_REGION_LENGTH,
            stride: DEFAULT_CANDIDATE_STRIDE,
        }
    }

    pub fn random(seed: u64) -> Self {
        Self {
            kind: StrategyKind::Random,
            seed,
            ..Self::worst_confidence()
        }
    }

    pub fn with_regions(mut self, region_length: f64, stride: f64) -> Self {
        self.region_length = region_length;
        self.stride = stride;
        self
    }
}

/// One candidate region with its mean top-label confidence.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredCandidate {
    pub file_id: String,
    pub start_frame: usize,
    pub len_frames: usize,
    pub frame_rate: f64,
    /// Arithmetic mean of the per-frame top-label confidence.
    pub score: f64,
}

impl ScoredCandidate {
    pub fn region(&self) -> Region {
        Region {
            file_id: self.file_id.clone(),
            start: self.start_frame as f64 / self.frame_rate,
            end: (self.start_frame + self.len_frames) as f64 / self.frame_rate,
        }
    }
}

/// Sliding candidates over one track. Region boundaries snap to frame
/// boundaries; files shorter than the region length yield no candidates.
pub fn score_candidate_regions(
    track: &PosteriorTrack,
    region_length: f64,
    stride: f64,
) -> Vec<ScoredCandidate> {
    let rate = track.grid.frame_rate;
    let len_frames = ((region_length * rate).round() as usize).max(1);
    let stride_frames = ((stride * rate).round() as usize).max(1);
    if len_frames > track.num_frames() {
        return Vec::new();
    }
    // Prefix sums of per-frame top-label confidence (the row maximum).
    let mut prefix = Vec::with_capacity(track.num_frames() + 1);
    prefix.push(0.0f64);
    for t in 0..track.num_frames() {
        let top = track
            .row(t)
            .iter()
            .fold(f32::NEG_INFINITY, |m, &p| m.max(p));
        prefix.push(prefix[t] + f64::from(top));
    }
    let mut candidates = Vec::new();
    let mut start = 0usize;
    while start + len_frames <= track.num_frames() {
        let score = (prefix[start + len_frames] - prefix[start]) / len_frames as f64;
        candidates.push(ScoredCandidate {
            file_id: track.file_id.clone(),
            start_frame: start,
            len_frames,
            frame_rate: rate,
            score,
        });
        start += stride_frames;
    }
    candidates
}

/// The outcome of a budgeted selection, in selection order.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub regions: Vec<Region>,
    /// Mean confidence of each selected region, parallel to `regions`.
    pub scores: Vec<f64>,
    pub requested_seconds: f64,
    pub selected_seconds: f64,
    /// True when the candidates ran out before the budget was met.
    pub shortfall: bool,
}

/// Greedily selects pairwise non-overlapping regions until the cumulative
/// duration reaches the budget (whole regions only) or candidates run out.
///
/// Worst-confidence ordering is ascending score with deterministic
/// `(file_id, start)` tie-breaks; random ordering is a seeded shuffle.
pub fn select_regions(
    tracks: &[&PosteriorTrack],
    strategy: &SelectionStrategy,
    budget_seconds: f64,
) -> Result<Selection> {
    if !budget_seconds.is_finite() || budget_seconds <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "budget must be > 0, got {budget_seconds}"
        )));
    }
    let mut candidates: Vec<ScoredCandidate> = tracks
        .iter()
        .flat_map(|t| score_candidate_regions(t, strategy.region_length, strategy.stride))
        .collect();
    match strategy.kind {
        StrategyKind::WorstConfidence => candidates.sort_by(|a, b| {
            a.score
                .total_cmp(&b.score)
                .then_with(|| a.file_id.cmp(&b.file_id))
                .then_with(|| a.start_frame.cmp(&b.start_frame))
        }),
        StrategyKind::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(strategy.seed);
            candidates.shuffle(&mut rng);
        }
    }

    let mut accepted: Vec<(Region, f64)> = Vec::new();
    let mut spans: BTreeMap<&str, Vec<(usize, usize)>> = BTreeMap::new();
    let mut selected_seconds = 0.0f64;
    for cand in &candidates {
        if selected_seconds >= budget_seconds - 1e-6 {
            break;
        }
        let lo = cand.start_frame;
        let hi = cand.start_frame + cand.len_frames;
        let occupied = spans.entry(cand.file_id.as_str()).or_default();
        if occupied.iter().any(|&(s, e)| lo < e && s < hi) {
            continue;
        }
        occupied.push((lo, hi));
        let region = cand.region();
        selected_seconds += region.duration();
        accepted.push((region, cand.score));
    }
    let shortfall = selected_seconds < budget_seconds - 1e-6;
    let (regions, scores) = accepted.into_iter().unzip();
    Ok(Selection {
        regions,
        scores,
        requested_seconds: budget_seconds,
        selected_seconds,
        shortfall,
    })
}

/// Frame counts by reference content: no speaker, exactly one, two or more.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Composition {
    pub nonspeech: u64,
    pub speech: u64,
    pub overlap: u64,
}

impl Composition {
    pub fn total(&self) -> u64 {
        self.nonspeech + self.speech + self.overlap
    }

    /// `(nonspeech, speech, overlap)` fractions summing to 1; all zero for
    /// an empty count.
    pub fn fractions(&self) -> (f64, f64, f64) {
        let total = self.total();
        if total == 0 {
            return (0.0, 0.0, 0.0);
        }
        let t = total as f64;
        (
            self.nonspeech as f64 / t,
            self.speech as f64 / t,
            self.overlap as f64 / t,
        )
    }

    pub fn overlap_fraction(&self) -> f64 {
        self.fractions().2
    }

    pub fn add_frame(&mut self, active_speakers: usize) {
        match active_speakers {
            0 => self.nonspeech += 1,
            1 => self.speech += 1,
            _ => self.overlap += 1,
        }
    }

    pub fn merge(&mut self, other: Composition) {
        self.nonspeech += other.nonspeech;
        self.speech += other.speech;
        self.overlap += other.overlap;
    }
}

/// Partitions frames by their active reference speaker count.
pub fn frame_composition<I: IntoIterator<Item = usize>>(active_counts: I) -> Composition {
    let mut composition = Composition::default();
    for n in active_counts {
        composition.add_frame(n);
    }
    composition
}

/// Cumulative metrics after a prefix of the selection.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetCurvePoint {
    pub seconds_selected: f64,
    pub breakdown: DerBreakdown,
    pub composition: Composition,
}

/// The budget curve plus whole-set baselines (the dashed reference lines).
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetCurves {
    /// One point per region, in selection order.
    pub points: Vec<BudgetCurvePoint>,
    pub whole_breakdown: DerBreakdown,
    pub whole_composition: Composition,
}

struct FileMetrics {
    /// Summed DER contribution per timeline frame.
    counts: Vec<FrameErrorCounts>,
    /// Active reference speaker count per timeline frame.
    active: Vec<usize>,
}

/// Evaluates cumulative DER breakdown and data composition after each
/// region of an ordered selection.
pub fn budget_curves(
    regions: &[Region],
    annotations: &AnnotationSet,
    tracks: &[&PosteriorTrack],
    mapping: &PowersetMapping,
) -> Result<BudgetCurves> {
    let mut per_file: BTreeMap<&str, FileMetrics> = BTreeMap::new();
    let mut whole_breakdown = DerBreakdown::default();
    let mut whole_composition = Composition::default();
    for track in tracks {
        let result = local_der(track, mapping, annotations)?;
        whole_breakdown.merge(result.breakdown);
        let mut counts = vec![FrameErrorCounts::default(); track.num_frames()];
        for f in &result.frames {
            let c = f.counts.expect("local_der always attaches counts");
            let slot = &mut counts[f.timeline_frame];
            slot.false_alarm += c.false_alarm;
            slot.missed += c.missed;
            slot.confusion += c.confusion;
            slot.speech += c.speech;
        }
        let raster = rasterize_full(annotations, &track.file_id, &track.grid);
        let active: Vec<usize> = (0..track.num_frames())
            .map(|t| raster.active_count(t))
            .collect();
        whole_composition.merge(frame_composition(active.iter().copied()));
        per_file.insert(
            track.file_id.as_str(),
            FileMetrics { counts, active },
        );
    }

    let grids: BTreeMap<&str, &PosteriorTrack> =
        tracks.iter().map(|t| (t.file_id.as_str(), *t)).collect();
    let mut points = Vec::with_capacity(regions.len());
    let mut cumulative = DerBreakdown::default();
    let mut composition = Composition::default();
    let mut seconds = 0.0f64;
    for region in regions {
        let track = grids
            .get(region.file_id.as_str())
            .ok_or_else(|| Error::UnknownFile(region.file_id.clone()))?;
        let metrics = &per_file[region.file_id.as_str()];
        for t in track.grid.frames_within(region.start, region.end) {
            cumulative.add_frame(metrics.counts[t]);
            composition.add_frame(metrics.active[t]);
        }
        seconds += region.duration();
        points.push(BudgetCurvePoint {
            seconds_selected: seconds,
            breakdown: cumulative,
            composition,
        });
    }
    Ok(BudgetCurves {
        points,
        whole_breakdown,
        whole_composition,
    })
}

/// Writes the selection as JSON lines:
/// `{"file_id":..,"start":..,"end":..,"score":..,"rank":..}`.
pub fn write_selection_manifest<W: std::io::Write>(
    selection: &Selection,
    mut writer: W,
) -> Result<()> {
    #[derive(Serialize)]
    struct Line<'a> {
        file_id: &'a str,
        start: f64,
        end: f64,
        score: f64,
        rank: usize,
    }
    for (rank, (region, score)) in selection.regions.iter().zip(&selection.scores).enumerate() {
        let line = Line {
            file_id: &region.file_id,
            start: region.start,
            end: region.end,
            score: *score,
            rank,
        };
        serde_json::to_writer(&mut writer, &line)?;
        writeln!(writer)?;
    }
    Ok(())
}

/// Reads a JSON-lines selection manifest back into regions.
pub fn read_selection_manifest<R: std::io::BufRead>(reader: R) -> Result<Vec<Region>> {
    #[derive(Deserialize)]
    struct Line {
        file_id: String,
        start: f64,
        end: f64,
    }
    let mut regions = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Line = serde_json::from_str(&line)?;
        regions.push(Region {
            file_id: parsed.file_id,
            start: parsed.start,
            end: parsed.end,
        });
    }
    Ok(regions)
}

fn write_curve_row<W: std::io::Write>(
    writer: &mut W,
    seconds: f64,
    breakdown: &DerBreakdown,
    composition: &Composition,
) -> std::io::Result<()> {
    let (nonspeech, speech, overlap) = composition.fractions();
    writeln!(
        writer,
        "{:.6},{},{},{},{},{:.6},{:.6},{:.6}",
        seconds,
        breakdown.false_alarm,
        breakdown.missed,
        breakdown.confusion,
        breakdown.der().map_or(String::new(), |d| format!("{d:.6}")),
        nonspeech,
        speech,
        overlap
    )
}

pub const CURVE_CSV_HEADER: &str =
    "seconds,false_alarm,missed,confusion,der,nonspeech,speech,overlap";

/// Writes curve points as the
/// `seconds,false_alarm,missed,confusion,der,nonspeech,speech,overlap` CSV.
pub fn write_curves_csv<W: std::io::Write>(
    curves: &BudgetCurves,
    mut writer: W,
) -> std::io::Result<()> {
    writeln!(writer, "{CURVE_CSV_HEADER}")?;
    for p in &curves.points {
        write_curve_row(&mut writer, p.seconds_selected, &p.breakdown, &p.composition)?;
    }
    Ok(())
}

/// Writes the whole-set baseline as a one-row CSV with the same columns.
pub fn write_whole_set_csv<W: std::io::Write>(
    curves: &BudgetCurves,
    total_seconds: f64,
    mut writer: W,
) -> std::io::Result<()> {
    writeln!(writer, "{CURVE_CSV_HEADER}")?;
    write_curve_row(
        &mut writer,
        total_seconds,
        &curves.whole_breakdown,
        &curves.whole_composition,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotations::{FrameGrid, SegmentAnnotation};
    use crate::labels::{build_powerset_mapping, PowersetConfig};

    /// Track with a given per-frame top confidence in a 2-class space.
    fn confidence_track(file_id: &str, confidences: &[f32], frame_rate: f64) -> PosteriorTrack {
        let rows: Vec<f32> = confidences
            .iter()
            .flat_map(|&c| [c, 1.0 - c])
            .collect();
        PosteriorTrack::new(
            file_id,
            FrameGrid::new(frame_rate, confidences.len()).unwrap(),
            2,
            rows,
            5.0,
            5.0,
        )
        .unwrap()
    }

    #[test]
    fn constant_confidence_scores_every_candidate_equally() {
        let track = confidence_track("f", &[0.9; 100], 10.0);
        let candidates = score_candidate_regions(&track, 2.0, 1.0);
        assert!(!candidates.is_empty());
        for c in &candidates {
            assert!((c.score - f64::from(0.9f32)).abs() < 1e-9);
        }
    }

    #[test]
    fn mean_confidence_averages_over_the_region() {
        // First half of the region at 0.5, second half at 1.0 -> 0.75.
        let mut confidences = vec![0.5f32; 10];
        confidences.extend(vec![1.0f32; 10]);
        let track = confidence_track("f", &confidences, 10.0);
        let candidates = score_candidate_regions(&track, 2.0, 2.0);
        assert_eq!(candidates.len(), 1);
        assert!((candidates[0].score - 0.75).abs() < 1e-9);
    }

    #[test]
    fn twenty_second_file_yields_six_staggered_candidates() {
        // 7.5 s regions at a 2.5 s stride: starts 0, 2.5, ..., 12.5.
        let track = confidence_track("f", &[0.8; 200], 10.0);
        let candidates = score_candidate_regions(&track, 7.5, 2.5);
        assert_eq!(candidates.len(), 6);
        let starts: Vec<usize> = candidates.iter().map(|c| c.start_frame).collect();
        assert_eq!(starts, vec![0, 25, 50, 75, 100, 125]);
        // The count also holds on the non-integer default grid.
        let track = confidence_track(
            "f",
            &[0.8; 666],
            crate::annotations::DEFAULT_FRAME_RATE,
        );
        assert_eq!(score_candidate_regions(&track, 7.5, 2.5).len(), 6);
    }

    #[test]
    fn short_files_yield_no_candidates() {
        let track = confidence_track("f", &[0.8; 30], 10.0);
        assert!(score_candidate_regions(&track, 7.5, 2.5).is_empty());
    }

    #[test]
    fn single_region_budget_takes_the_global_minimum() {
        let mut confidences = vec![0.95f32; 300];
        for c in confidences.iter_mut().take(120).skip(80) {
            *c = 0.55;
        }
        let track = confidence_track("f", &confidences, 10.0);
        let strategy = SelectionStrategy::worst_confidence().with_regions(2.0, 1.0);
        let selection = select_regions(&[&track], &strategy, 2.0).unwrap();
        assert_eq!(selection.regions.len(), 1);
        // The dip sits at frames 80..120 (seconds 8..12).
        let region = &selection.regions[0];
        assert!(region.start >= 8.0 && region.end <= 12.0, "{region:?}");
        assert!(!selection.shortfall);
    }

    #[test]
    fn uniform_confidence_breaks_ties_by_file_then_start() {
        let track_b = confidence_track("b", &[0.8; 100], 10.0);
        let track_a = confidence_track("a", &[0.8; 100], 10.0);
        let strategy = SelectionStrategy::worst_confidence().with_regions(2.0, 2.0);
        let selection = select_regions(&[&track_b, &track_a], &strategy, 6.0).unwrap();
        let picks: Vec<(String, f64)> = selection
            .regions
            .iter()
            .map(|r| (r.file_id.clone(), r.start))
            .collect();
        assert_eq!(
            picks,
            vec![
                ("a".to_string(), 0.0),
                ("a".to_string(), 2.0),
                ("a".to_string(), 4.0)
            ]
        );
    }

    #[test]
    fn selected_regions_never_overlap_and_meet_the_length() {
        let track = confidence_track("f", &[0.8; 400], 10.0);
        for strategy in [
            SelectionStrategy::worst_confidence().with_regions(7.5, 2.5),
            SelectionStrategy::random(9).with_regions(7.5, 2.5),
        ] {
            let selection = select_regions(&[&track], &strategy, 30.0).unwrap();
            assert_eq!(selection.regions.len(), 4); // 4 x 7.5 s = 30 s
            for (i, a) in selection.regions.iter().enumerate() {
                assert!((a.duration() - 7.5).abs() < 1e-9);
                for b in &selection.regions[i + 1..] {
                    assert!(!a.overlaps(b), "{a:?} overlaps {b:?}");
                }
            }
        }
    }

    #[test]
    fn worst_confidence_scores_are_non_decreasing() {
        let confidences: Vec<f32> = (0..500)
            .map(|i| 0.55 + 0.4 * ((i as f32 * 0.37).sin().abs()))
            .collect();
        let track = confidence_track("f", &confidences, 10.0);
        let strategy = SelectionStrategy::worst_confidence().with_regions(3.0, 1.0);
        let selection = select_regions(&[&track], &strategy, 30.0).unwrap();
        for pair in selection.scores.windows(2) {
            assert!(pair[0] <= pair[1] + 1e-12);
        }
    }

    #[test]
    fn random_selection_is_reproducible_and_seed_sensitive() {
        let track = confidence_track("f", &[0.8; 1000], 10.0);
        let a = select_regions(&[&track], &SelectionStrategy::random(1), 30.0).unwrap();
        let b = select_regions(&[&track], &SelectionStrategy::random(1), 30.0).unwrap();
        let c = select_regions(&[&track], &SelectionStrategy::random(2), 30.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.regions, c.regions);
    }

    #[test]
    fn oversized_budget_returns_everything_with_shortfall() {
        let track = confidence_track("f", &[0.8; 100], 10.0);
        let strategy = SelectionStrategy::worst_confidence().with_regions(2.0, 2.0);
        let selection = select_regions(&[&track], &strategy, 1e6).unwrap();
        assert!(selection.shortfall);
        assert_eq!(selection.regions.len(), 5);
        assert!((selection.selected_seconds - 10.0).abs() < 1e-9);
    }

    #[test]
    fn composition_partitions_frames() {
        let composition = frame_composition([0, 0, 1, 2, 3, 1]);
        assert_eq!(composition.nonspeech, 2);
        assert_eq!(composition.speech, 2);
        assert_eq!(composition.overlap, 2);
        let (n, s, o) = composition.fractions();
        assert!((n + s + o - 1.0).abs() < 1e-9);
    }

    #[test]
    fn curve_endpoint_matches_whole_set_when_selection_covers_everything() {
        let mapping = build_powerset_mapping(PowersetConfig::new(3, 2).unwrap());
        // 2-speaker reference; deliberately wrong prediction in the middle.
        let mut classes = vec![1usize; 100];
        for c in classes.iter_mut().take(60).skip(40) {
            *c = 0;
        }
        let rows: Vec<f32> = classes
            .iter()
            .flat_map(|&c| {
                let mut row = [0.0f32; 7];
                row[c] = 1.0;
                row
            })
            .collect();
        let track = PosteriorTrack::new(
            "f",
            FrameGrid::new(10.0, 100).unwrap(),
            7,
            rows,
            5.0,
            5.0,
        )
        .unwrap();
        let mut set = AnnotationSet::new();
        set.push(SegmentAnnotation::new("f", "a", 0.0, 10.0).unwrap());
        // Four 2.5 s regions tile the 10 s file exactly.
        let regions: Vec<Region> = (0..4)
            .map(|i| Region {
                file_id: "f".into(),
                start: i as f64 * 2.5,
                end: (i + 1) as f64 * 2.5,
            })
            .collect();
        let curves = budget_curves(&regions, &set, &[&track], &mapping).unwrap();
        let last = curves.points.last().unwrap();
        assert_eq!(last.breakdown, curves.whole_breakdown);
        assert_eq!(last.composition, curves.whole_composition);
        assert!((last.seconds_selected - 10.0).abs() < 1e-9);
        // Seconds are monotone along the curve.
        for pair in curves.points.windows(2) {
            assert!(pair[0].seconds_selected < pair[1].seconds_selected);
        }
    }

    #[test]
    fn curves_reject_regions_for_unknown_files() {
        let mapping = build_powerset_mapping(PowersetConfig::new(3, 2).unwrap());
        let track = confidence_track("f", &[0.9; 10], 10.0);
        let mut set = AnnotationSet::new();
        set.push(SegmentAnnotation::new("f", "a", 0.0, 1.0).unwrap());
        let region = Region {
            file_id: "ghost".into(),
            start: 0.0,
            end: 1.0,
        };
        // 2-class track against a 7-class mapping errors first; use a
        // matching mapping via the unknown-file path.
        let mapping2 = build_powerset_mapping(PowersetConfig::new(1, 1).unwrap());
        assert!(
            budget_curves(std::slice::from_ref(&region), &set, &[&track], &mapping).is_err()
        );
        match budget_curves(&[region], &set, &[&track], &mapping2) {
            Err(Error::UnknownFile(id)) => assert_eq!(id, "ghost"),
            other => panic!("expected UnknownFile, got {other:?}"),
        }
    }

    #[test]
    fn manifest_round_trips_regions() {
        let selection = Selection {
            regions: vec![
                Region {
                    file_id: "a".into(),
                    start: 0.0,
                    end: 7.5,
                },
                Region {
                    file_id: "b".into(),
                    start: 2.5,
                    end: 10.0,
                },
            ],
            scores: vec![0.61, 0.72],
            requested_seconds: 15.0,
            selected_seconds: 15.0,
            shortfall: false,
        };
        let mut bytes = Vec::new();
        write_selection_manifest(&selection, &mut bytes).unwrap();
        let back = read_selection_manifest(bytes.as_slice()).unwrap();
        assert_eq!(back, selection.regions);
    }
}

//! Local diarization error rate: per-window optimal speaker alignment and
//! the false-alarm / missed-detection / speaker-confusion decomposition.
//!
//! All scoring happens on the raw window outputs of the segmentation model,
//! before any clustering step: each window is aligned with the reference
//! independently and contributes frame counts to a running total. The
//! resulting "local DER" is a property of the local model and is not
//! comparable to pipeline-level DER figures.

use serde::{Deserialize, Serialize};

use crate::annotations::{rasterize, AnnotationSet};
use crate::assignment::max_weight_assignment;
use crate::calibration::{FrameErrorCounts, ScoredFrame};
use crate::error::{Error, Result};
use crate::labels::PowersetMapping;
use crate::posteriors::PosteriorTrack;

/// Accumulated DER counts. `der` may exceed 1 since false alarms are not
/// bounded by the amount of reference speech.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerBreakdown {
    pub false_alarm: u64,
    pub missed: u64,
    pub confusion: u64,
    pub total_speech: u64,
}

impl DerBreakdown {
    /// `(false_alarm + missed + confusion) / total_speech`, or `None` when
    /// the reference holds no speech (undefined rather than zero).
    pub fn der(&self) -> Option<f64> {
        (self.total_speech > 0)
            .then(|| (self.false_alarm + self.missed + self.confusion) as f64 / self.total_speech as f64)
    }

    pub fn errors(&self) -> u64 {
        self.false_alarm + self.missed + self.confusion
    }

    pub fn add_frame(&mut self, counts: FrameErrorCounts) {
        self.false_alarm += u64::from(counts.false_alarm);
        self.missed += u64::from(counts.missed);
        self.confusion += u64::from(counts.confusion);
        self.total_speech += u64::from(counts.speech);
    }

    pub fn merge(&mut self, other: DerBreakdown) {
        self.false_alarm += other.false_alarm;
        self.missed += other.missed;
        self.confusion += other.confusion;
        self.total_speech += other.total_speech;
    }
}

/// Injective partial map from predicted local speaker indices to reference
/// local speaker indices, produced by the per-window alignment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpeakerMapping {
    /// `(predicted, reference)` pairs sorted by predicted index.
    pub pairs: Vec<(usize, usize)>,
}

impl SpeakerMapping {
    pub fn target(&self, predicted: usize) -> Option<usize> {
        self.pairs
            .iter()
            .find(|(p, _)| *p == predicted)
            .map(|(_, r)| *r)
    }
}

/// Aligns predicted and reference local speakers for one window.
///
/// Both matrices are frame-major activity matrices over the same frames.
/// The mapping maximizes the total co-activity count
/// `sum_t sum_{p->r} pred[t][p] * ref[t][r]` via optimal assignment; ties
/// prefer lower `(p, r)` index pairs, and pairs with zero co-activity stay
/// unmapped.
pub fn optimal_speaker_mapping(pred: &[Vec<bool>], reference: &[Vec<bool>]) -> SpeakerMapping {
    assert_eq!(
        pred.len(),
        reference.len(),
        "prediction and reference must cover the same frames"
    );
    let n_pred = pred.first().map_or(0, Vec::len);
    let n_ref = reference.first().map_or(0, Vec::len);
    if n_pred == 0 || n_ref == 0 {
        return SpeakerMapping::default();
    }
    let mut weights = vec![vec![0u64; n_ref]; n_pred];
    for (pred_row, ref_row) in pred.iter().zip(reference) {
        for (p, &active) in pred_row.iter().enumerate() {
            if !active {
                continue;
            }
            for (r, &ref_active) in ref_row.iter().enumerate() {
                if ref_active {
                    weights[p][r] += 1;
                }
            }
        }
    }
    let assignment = max_weight_assignment(&weights);
    SpeakerMapping {
        pairs: assignment
            .iter()
            .enumerate()
            .filter_map(|(p, r)| r.map(|r| (p, r)))
            .collect(),
    }
}

/// DER contribution of one frame given the window's speaker mapping.
///
/// With `n_pred` and `n_ref` active counts and `n_correct` the number of
/// mapped pairs active on both sides:
/// `false_alarm = max(0, n_pred - n_ref)`, `missed = max(0, n_ref - n_pred)`,
/// `confusion = min(n_pred, n_ref) - n_correct`, and the frame adds `n_ref`
/// to the speech denominator.
pub fn frame_der_counts(
    pred_frame: &[bool],
    ref_frame: &[bool],
    mapping: &SpeakerMapping,
) -> FrameErrorCounts {
    let n_pred = pred_frame.iter().filter(|&&a| a).count() as u32;
    let n_ref = ref_frame.iter().filter(|&&a| a).count() as u32;
    let n_correct = mapping
        .pairs
        .iter()
        .filter(|&&(p, r)| pred_frame[p] && ref_frame[r])
        .count() as u32;
    FrameErrorCounts {
        false_alarm: n_pred.saturating_sub(n_ref),
        missed: n_ref.saturating_sub(n_pred),
        confusion: n_pred.min(n_ref) - n_correct,
        speech: n_ref,
    }
}

/// Local DER of one posterior track plus the per-frame contributions used
/// by downstream binning and budget curves.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalDerResult {
    pub breakdown: DerBreakdown,
    /// One entry per scored window frame, in window order. With overlapping
    /// strides a timeline frame appears once per covering window.
    pub frames: Vec<ScoredFrame>,
}

/// Scores a track against its reference annotations window by window.
///
/// Per window: rows are argmax-decoded into powerset classes and expanded to
/// multilabel activity, the reference is rasterized onto the same frames,
/// the optimal speaker mapping is computed, and every frame contributes its
/// error counts. A frame is "correct" exactly when it contributes no error.
pub fn local_der(
    track: &PosteriorTrack,
    mapping: &PowersetMapping,
    annotations: &AnnotationSet,
) -> Result<LocalDerResult> {
    if track.num_classes != mapping.num_classes() {
        return Err(Error::InvalidConfig(format!(
            "track has {} classes but mapping has {}",
            track.num_classes,
            mapping.num_classes()
        )));
    }
    if !annotations.contains_file(&track.file_id) {
        return Err(Error::UnknownFile(track.file_id.clone()));
    }
    let mut breakdown = DerBreakdown::default();
    let mut frames = Vec::with_capacity(track.num_frames());
    for (start, end) in track.windows() {
        let span = track.grid.frames_within(start, end);
        if span.is_empty() {
            continue;
        }
        let mut pred = Vec::with_capacity(span.len());
        let mut confidences = Vec::with_capacity(span.len());
        for t in span.clone() {
            let top = mapping.top_label(track.row(t)).map_err(|_| Error::InvalidRow {
                row: t,
                reason: "malformed posterior row".into(),
            })?;
            confidences.push(top.confidence);
            pred.push(mapping.class_to_multilabel(top.class_index)?);
        }
        let raster = rasterize(annotations, &track.file_id, &track.grid, (start, end));
        debug_assert_eq!(raster.start_frame, span.start);
        let speaker_map = optimal_speaker_mapping(&pred, &raster.activity);
        for (i, t) in span.enumerate() {
            let counts = frame_der_counts(&pred[i], &raster.activity[i], &speaker_map);
            breakdown.add_frame(counts);
            frames.push(ScoredFrame {
                timeline_frame: t,
                confidence: confidences[i],
                correct: counts.is_clean(),
                counts: Some(counts),
            });
        }
    }
    Ok(LocalDerResult { breakdown, frames })
}

/// Writes per-file rows plus a `TOTAL` row as the
/// `file_id,false_alarm,missed,confusion,total_speech,der` CSV.
pub fn write_der_csv<W: std::io::Write>(
    rows: &[(String, DerBreakdown)],
    mut writer: W,
) -> std::io::Result<()> {
    writeln!(writer, "file_id,false_alarm,missed,confusion,total_speech,der")?;
    let mut total = DerBreakdown::default();
    for (file_id, b) in rows {
        total.merge(*b);
        writeln!(
            writer,
            "{},{},{},{},{},{}",
            file_id,
            b.false_alarm,
            b.missed,
            b.confusion,
            b.total_speech,
            b.der().map_or(String::new(), |d| format!("{d:.6}"))
        )?;
    }
    writeln!(
        writer,
        "TOTAL,{},{},{},{},{}",
        total.false_alarm,
        total.missed,
        total.confusion,
        total.total_speech,
        total.der().map_or(String::new(), |d| format!("{d:.6}"))
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotations::{FrameGrid, SegmentAnnotation};
    use crate::labels::{build_powerset_mapping, PowersetConfig};
    use crate::posteriors::PosteriorTrack;

    fn mapping_3_2() -> PowersetMapping {
        build_powerset_mapping(PowersetConfig::new(3, 2).unwrap())
    }

    /// One-hot posterior rows for a sequence of class indices.
    fn one_hot_track(
        file_id: &str,
        classes: &[usize],
        num_classes: usize,
        frame_rate: f64,
        window_length: f32,
    ) -> PosteriorTrack {
        let mut rows = Vec::with_capacity(classes.len() * num_classes);
        for &c in classes {
            for i in 0..num_classes {
                rows.push(if i == c { 1.0 } else { 0.0 });
            }
        }
        PosteriorTrack::new(
            file_id,
            FrameGrid::new(frame_rate, classes.len()).unwrap(),
            num_classes,
            rows,
            window_length,
            window_length,
        )
        .unwrap()
    }

    #[test]
    fn identical_matrices_map_to_identity() {
        let m = vec![
            vec![true, false],
            vec![false, true],
            vec![true, true],
        ];
        let map = optimal_speaker_mapping(&m, &m);
        assert_eq!(map.pairs, vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn permuted_columns_recover_the_inverse_permutation() {
        let reference = vec![
            vec![true, false, false],
            vec![false, true, false],
            vec![false, false, true],
            vec![true, true, false],
        ];
        // Predicted columns are reference columns shuffled as [2, 0, 1].
        let pred: Vec<Vec<bool>> = reference
            .iter()
            .map(|row| vec![row[2], row[0], row[1]])
            .collect();
        let map = optimal_speaker_mapping(&pred, &reference);
        assert_eq!(map.pairs, vec![(0, 2), (1, 0), (2, 1)]);
    }

    #[test]
    fn frame_counts_cover_the_three_error_kinds() {
        // Missed: prediction silent, one reference speaker.
        let map = SpeakerMapping::default();
        let c = frame_der_counts(&[false], &[true], &map);
        assert_eq!((c.false_alarm, c.missed, c.confusion, c.speech), (0, 1, 0, 1));

        // False alarm: one predicted speaker, silent reference.
        let c = frame_der_counts(&[true], &[false], &map);
        assert_eq!((c.false_alarm, c.missed, c.confusion, c.speech), (1, 0, 0, 0));

        // Confusion: the active predicted speaker maps elsewhere.
        let map = SpeakerMapping {
            pairs: vec![(0, 1)],
        };
        let c = frame_der_counts(&[true], &[true, false], &map);
        assert_eq!((c.false_alarm, c.missed, c.confusion, c.speech), (0, 0, 1, 1));
    }

    #[test]
    fn perfect_predictions_have_zero_der() {
        let mapping = mapping_3_2();
        // Reference speaker a covers all 10 frames at 1 fps; class {0} = 1.
        let classes = vec![1usize; 10];
        let track = one_hot_track("f", &classes, 7, 1.0, 5.0);
        let mut set = AnnotationSet::new();
        set.push(SegmentAnnotation::new("f", "a", 0.0, 10.0).unwrap());
        let result = local_der(&track, &mapping, &set).unwrap();
        assert_eq!(result.breakdown.der(), Some(0.0));
        assert!(result.frames.iter().all(|f| f.correct));
        assert_eq!(result.breakdown.total_speech, 10);
    }

    #[test]
    fn all_silence_prediction_on_speech_misses_everything() {
        let mapping = mapping_3_2();
        let classes = vec![0usize; 10]; // class 0 = silence
        let track = one_hot_track("f", &classes, 7, 1.0, 5.0);
        let mut set = AnnotationSet::new();
        set.push(SegmentAnnotation::new("f", "a", 0.0, 10.0).unwrap());
        let result = local_der(&track, &mapping, &set).unwrap();
        assert_eq!(result.breakdown.der(), Some(1.0));
        assert_eq!(result.breakdown.missed, 10);
    }

    #[test]
    fn hand_built_two_window_fixture_scores_der_0_3() {
        // 10 frames at 1 fps, two 5 s windows. Reference: speaker a on all
        // 10 frames (10 speech frames). Prediction: frames 0-2 correct,
        // frames 3-4 silent (2 missed), frames 5-9 correct with one extra
        // speaker at frame 7 (1 false alarm). DER = (1+2+0)/10 = 0.3.
        let mapping = mapping_3_2();
        let classes = vec![1, 1, 1, 0, 0, 1, 1, 4, 1, 1]; // class 4 = {0,1}
        let track = one_hot_track("f", &classes, 7, 1.0, 5.0);
        let mut set = AnnotationSet::new();
        set.push(SegmentAnnotation::new("f", "a", 0.0, 10.0).unwrap());
        let result = local_der(&track, &mapping, &set).unwrap();
        assert_eq!(result.breakdown.false_alarm, 1);
        assert_eq!(result.breakdown.missed, 2);
        assert_eq!(result.breakdown.confusion, 0);
        assert_eq!(result.breakdown.total_speech, 10);
        assert!((result.breakdown.der().unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn missing_annotations_for_file_is_an_error() {
        let mapping = mapping_3_2();
        let track = one_hot_track("f", &[0, 0], 7, 1.0, 5.0);
        let set = AnnotationSet::new();
        match local_der(&track, &mapping, &set) {
            Err(Error::UnknownFile(id)) => assert_eq!(id, "f"),
            other => panic!("expected UnknownFile, got {other:?}"),
        }
    }

    #[test]
    fn der_is_invariant_under_reference_speaker_renaming() {
        let mapping = mapping_3_2();
        // Prediction swaps which local class is used per segment; the
        // reference names speakers differently. Alignment absorbs both.
        let classes = vec![1, 1, 1, 2, 2, 2, 4, 4, 0, 0];
        let track = one_hot_track("f", &classes, 7, 1.0, 10.0);
        let mut base = AnnotationSet::new();
        base.push(SegmentAnnotation::new("f", "alice", 0.0, 3.0).unwrap());
        base.push(SegmentAnnotation::new("f", "bob", 3.0, 5.0).unwrap());
        let mut renamed = AnnotationSet::new();
        renamed.push(SegmentAnnotation::new("f", "zz", 0.0, 3.0).unwrap());
        renamed.push(SegmentAnnotation::new("f", "aa", 3.0, 5.0).unwrap());
        let a = local_der(&track, &mapping, &base).unwrap();
        let b = local_der(&track, &mapping, &renamed).unwrap();
        assert_eq!(a.breakdown, b.breakdown);
    }

    #[test]
    fn aggregate_equals_sum_of_per_frame_contributions() {
        let mapping = mapping_3_2();
        let classes = vec![1, 4, 0, 2, 6, 1, 0, 5, 3, 1, 1, 0];
        let track = one_hot_track("f", &classes, 7, 1.0, 5.0);
        let mut set = AnnotationSet::new();
        set.push(SegmentAnnotation::new("f", "a", 0.0, 6.0).unwrap());
        set.push(SegmentAnnotation::new("f", "b", 4.0, 8.0).unwrap());
        let result = local_der(&track, &mapping, &set).unwrap();
        let mut summed = DerBreakdown::default();
        for f in &result.frames {
            summed.add_frame(f.counts.unwrap());
        }
        assert_eq!(summed, result.breakdown);
    }

    #[test]
    fn frame_contributions_are_nonnegative_and_bounded() {
        // Exhaustive over all small prediction/reference activity pairs.
        let patterns: Vec<Vec<bool>> = (0u32..8)
            .map(|m| (0..3).map(|i| m & (1 << i) != 0).collect())
            .collect();
        for pred in &patterns {
            for reference in &patterns {
                let map = optimal_speaker_mapping(
                    std::slice::from_ref(pred),
                    std::slice::from_ref(reference),
                );
                let c = frame_der_counts(pred, reference, &map);
                let n_pred = pred.iter().filter(|&&a| a).count() as u32;
                let n_ref = reference.iter().filter(|&&a| a).count() as u32;
                assert!(c.confusion <= n_pred.min(n_ref));
                assert_eq!(c.speech, n_ref);
                assert_eq!(c.false_alarm, n_pred.saturating_sub(n_ref));
                assert_eq!(c.missed, n_ref.saturating_sub(n_pred));
            }
        }
    }

    #[test]
    fn der_csv_includes_total_row_and_blank_undefined_der() {
        let rows = vec![
            (
                "a".to_string(),
                DerBreakdown {
                    false_alarm: 1,
                    missed: 2,
                    confusion: 0,
                    total_speech: 10,
                },
            ),
            ("b".to_string(), DerBreakdown::default()),
        ];
        let mut out = Vec::new();
        write_der_csv(&rows, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "file_id,false_alarm,missed,confusion,total_speech,der");
        assert_eq!(lines[1], "a,1,2,0,10,0.300000");
        assert_eq!(lines[2], "b,0,0,0,0,");
        assert_eq!(lines[3], "TOTAL,1,2,0,10,0.300000");
    }
}

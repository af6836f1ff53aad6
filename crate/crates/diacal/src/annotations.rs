//! Reference annotations: RTTM parsing/writing, frame grids, and
//! rasterization of "who spoke when" segments onto frame grids.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One reference speech segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentAnnotation {
    pub file_id: String,
    pub speaker: String,
    /// Onset in seconds from the start of the file.
    pub start: f64,
    /// Strictly positive length in seconds.
    pub duration: f64,
}

impl SegmentAnnotation {
    pub fn new(file_id: &str, speaker: &str, start: f64, duration: f64) -> Result<Self> {
        if !start.is_finite() || start < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "segment start must be finite and >= 0, got {start}"
            )));
        }
        if !duration.is_finite() || duration <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "segment duration must be > 0, got {duration}"
            )));
        }
        Ok(Self {
            file_id: file_id.to_string(),
            speaker: speaker.to_string(),
            start,
            duration,
        })
    }

    pub fn end(&self) -> f64 {
        self.start + self.duration
    }
}

/// Reference segments for one or more files. Segments of the same file may
/// overlap (simultaneous speakers).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnnotationSet {
    segments: Vec<SegmentAnnotation>,
}

impl AnnotationSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_segments(segments: Vec<SegmentAnnotation>) -> Self {
        Self { segments }
    }

    pub fn push(&mut self, segment: SegmentAnnotation) {
        self.segments.push(segment);
    }

    pub fn segments(&self) -> &[SegmentAnnotation] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    /// File ids present in the set, sorted.
    pub fn file_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.segments.iter().map(|s| s.file_id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    pub fn contains_file(&self, file_id: &str) -> bool {
        self.segments.iter().any(|s| s.file_id == file_id)
    }

    pub fn for_file<'a>(&'a self, file_id: &'a str) -> impl Iterator<Item = &'a SegmentAnnotation> {
        self.segments.iter().filter(move |s| s.file_id == file_id)
    }

    /// Merges another set into this one.
    pub fn extend(&mut self, other: AnnotationSet) {
        self.segments.extend(other.segments);
    }

    /// Total speech time of a file counting overlapped speech once per
    /// speaker (sum of per-segment durations).
    pub fn total_duration(&self, file_id: &str) -> f64 {
        self.for_file(file_id).map(|s| s.duration).sum()
    }
}

/// A fixed-rate frame grid. Frame `t` covers `[t/rate, (t+1)/rate)` seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameGrid {
    pub frame_rate: f64,
    pub num_frames: usize,
}

/// Default frame rate: 100/3 fps, i.e. 30 ms frames and 166 full frames per
/// 5 s window.
pub const DEFAULT_FRAME_RATE: f64 = 100.0 / 3.0;

impl FrameGrid {
    pub fn new(frame_rate: f64, num_frames: usize) -> Result<Self> {
        if !frame_rate.is_finite() || frame_rate <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "frame rate must be > 0, got {frame_rate}"
            )));
        }
        Ok(Self {
            frame_rate,
            num_frames,
        })
    }

    /// Grid covering `duration` seconds (frame count rounded to nearest).
    pub fn for_duration(frame_rate: f64, duration: f64) -> Result<Self> {
        if !duration.is_finite() || duration < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "duration must be >= 0, got {duration}"
            )));
        }
        let num_frames = (duration * frame_rate).round() as usize;
        Self::new(frame_rate, num_frames)
    }

    pub fn frame_duration(&self) -> f64 {
        1.0 / self.frame_rate
    }

    pub fn frame_start(&self, frame: usize) -> f64 {
        frame as f64 / self.frame_rate
    }

    pub fn duration(&self) -> f64 {
        self.num_frames as f64 / self.frame_rate
    }

    /// Indices of the frames whose interval lies fully inside
    /// `[start_s, end_s)`, clamped to the grid.
    pub fn frames_within(&self, start_s: f64, end_s: f64) -> Range<usize> {
        let lo = (start_s * self.frame_rate - 1e-9).ceil().max(0.0) as usize;
        let hi = ((end_s * self.frame_rate + 1e-9).floor().max(0.0) as usize).min(self.num_frames);
        lo..hi.max(lo)
    }
}

/// Parses RTTM. Only `SPEAKER` lines are kept; comment lines (`;`) and other
/// record types are skipped. A `SPEAKER` line has ten whitespace-separated
/// fields with start at field 4, duration at field 5, and speaker at field 8
/// (1-based).
pub fn parse_rttm<R: BufRead>(reader: R) -> Result<AnnotationSet> {
    let mut set = AnnotationSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with(';') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields[0] != "SPEAKER" {
            continue;
        }
        if fields.len() != 10 {
            return Err(Error::RttmParse {
                line: line_no,
                reason: format!("expected 10 fields, got {}", fields.len()),
            });
        }
        let start: f64 = fields[3].parse().map_err(|_| Error::RttmParse {
            line: line_no,
            reason: format!("non-numeric start time {:?}", fields[3]),
        })?;
        let duration: f64 = fields[4].parse().map_err(|_| Error::RttmParse {
            line: line_no,
            reason: format!("non-numeric duration {:?}", fields[4]),
        })?;
        let segment =
            SegmentAnnotation::new(fields[1], fields[7], start, duration).map_err(|e| {
                Error::RttmParse {
                    line: line_no,
                    reason: e.to_string(),
                }
            })?;
        set.push(segment);
    }
    Ok(set)
}

/// Writes RTTM with times printed at millisecond resolution.
pub fn write_rttm<W: Write>(set: &AnnotationSet, mut writer: W) -> std::io::Result<()> {
    for seg in set.segments() {
        writeln!(
            writer,
            "SPEAKER {} 1 {:.3} {:.3} <NA> <NA> {} <NA> <NA>",
            seg.file_id, seg.start, seg.duration, seg.speaker
        )?;
    }
    Ok(())
}

/// The rasterized reference of one window: per-frame speaker activity over
/// local speaker indices.
#[derive(Debug, Clone)]
pub struct RasterWindow {
    /// Timeline index of the first rasterized frame.
    pub start_frame: usize,
    /// Speaker names by local index, ordered by descending in-window speech
    /// duration (ties by name). Index 0 is the most prominent speaker.
    pub speakers: Vec<String>,
    /// `activity[i][s]` — frame `start_frame + i` is active for local
    /// speaker `s`.
    pub activity: Vec<Vec<bool>>,
}

impl RasterWindow {
    pub fn num_frames(&self) -> usize {
        self.activity.len()
    }

    pub fn num_speakers(&self) -> usize {
        self.speakers.len()
    }

    /// Active-speaker count of frame `i` (local index).
    pub fn active_count(&self, i: usize) -> usize {
        self.activity[i].iter().filter(|&&a| a).count()
    }
}

/// Rasterizes one file's annotations onto the frames of
/// `[window.0, window.1)`.
///
/// Speakers with speech inside the window get local indices by descending
/// in-window duration (ties by name). A frame is active for a speaker iff
/// the speaker's segments cover at least half of the frame interval.
pub fn rasterize(
    set: &AnnotationSet,
    file_id: &str,
    grid: &FrameGrid,
    window: (f64, f64),
) -> RasterWindow {
    let (win_start, win_end) = window;
    // Merge each speaker's segments (they may overlap) into disjoint
    // intervals clipped to the window.
    let mut by_speaker: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for seg in set.for_file(file_id) {
        let lo = seg.start.max(win_start);
        let hi = seg.end().min(win_end);
        if hi > lo {
            by_speaker.entry(seg.speaker.as_str()).or_default().push((lo, hi));
        }
    }
    // (name, merged intervals, in-window duration)
    type SpeakerSpans = (String, Vec<(f64, f64)>, f64);
    let mut speakers: Vec<SpeakerSpans> = by_speaker
        .into_iter()
        .map(|(name, mut intervals)| {
            intervals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
            for (lo, hi) in intervals {
                match merged.last_mut() {
                    Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                    _ => merged.push((lo, hi)),
                }
            }
            let total: f64 = merged.iter().map(|(lo, hi)| hi - lo).sum();
            (name.to_string(), merged, total)
        })
        .collect();
    // Descending duration, ties by name ascending.
    speakers.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap().then_with(|| a.0.cmp(&b.0)));

    let frames = grid.frames_within(win_start, win_end);
    let start_frame = frames.start;
    let half_frame = 0.5 * grid.frame_duration();
    let mut activity = vec![vec![false; speakers.len()]; frames.len()];
    for (s, (_, intervals, _)) in speakers.iter().enumerate() {
        for t in frames.clone() {
            let f_lo = grid.frame_start(t);
            let f_hi = f_lo + grid.frame_duration();
            let covered: f64 = intervals
                .iter()
                .map(|&(lo, hi)| (hi.min(f_hi) - lo.max(f_lo)).max(0.0))
                .sum();
            if covered >= half_frame - 1e-9 {
                activity[t - start_frame][s] = true;
            }
        }
    }
    RasterWindow {
        start_frame,
        speakers: speakers.into_iter().map(|(name, _, _)| name).collect(),
        activity,
    }
}

/// Rasterizes a whole file.
pub fn rasterize_full(set: &AnnotationSet, file_id: &str, grid: &FrameGrid) -> RasterWindow {
    rasterize(set, file_id, grid, (0.0, grid.duration() + 1e-9))
}

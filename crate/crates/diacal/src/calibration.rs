//! Top-label calibration metrics: expected calibration error over uniform or
//! adaptive (equal-population) bins, reliability-diagram data, and binwise
//! DER distributions.
//!
//! ECE = sum over bins of `prop(b) * |acc(b) - conf(b)|`, where `prop` is the
//! fraction of predictions in the bin and `acc`/`conf` are the mean accuracy
//! and confidence inside it. Empty bins contribute nothing. The confidence of
//! a prediction is the probability of the predicted class, which for a
//! probability vector over `C` classes is at least `1/C` — hence bins span
//! `[1/C, 1]`, not `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How samples are distributed over bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinKind {
    /// Equal-width intervals; samples assigned by confidence value.
    Uniform,
    /// Equal-population bins; samples assigned by confidence rank (stable
    /// order for ties), so populations differ by at most one.
    Adaptive,
}

/// Bin edges plus the assignment rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinScheme {
    edges: Vec<f64>,
    kind: BinKind,
}

impl BinScheme {
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn num_bins(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn kind(&self) -> BinKind {
        self.kind
    }
}

/// One scored prediction: the unit ECE sums over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredFrame {
    /// Timeline frame index the score refers to (windowed scoring may emit
    /// several scores for one timeline frame).
    pub timeline_frame: usize,
    /// Probability of the predicted class.
    pub confidence: f64,
    /// Whether the prediction was correct after window-level speaker
    /// alignment, i.e. the frame contributes zero DER errors.
    pub correct: bool,
    /// Per-frame DER contribution, when available.
    pub counts: Option<FrameErrorCounts>,
}

impl ScoredFrame {
    pub fn new(confidence: f64, correct: bool) -> Self {
        Self {
            timeline_frame: 0,
            confidence,
            correct,
            counts: None,
        }
    }
}

/// DER error counts contributed by a single frame.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameErrorCounts {
    pub false_alarm: u32,
    pub missed: u32,
    pub confusion: u32,
    /// Reference speech count (the DER denominator contribution).
    pub speech: u32,
}

impl FrameErrorCounts {
    pub fn is_clean(&self) -> bool {
        self.false_alarm == 0 && self.missed == 0 && self.confusion == 0
    }
}

/// Statistics of one non-empty bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinStats {
    pub bin_low: f64,
    pub bin_high: f64,
    pub count: usize,
    /// Fraction of all predictions landing in this bin.
    pub prop: f64,
    /// Mean accuracy in the bin.
    pub acc: f64,
    /// Mean confidence in the bin.
    pub conf: f64,
    /// DER of the frames in the bin; `None` when the bin holds no reference
    /// speech (undefined denominator) or no DER counts were supplied.
    pub der: Option<f64>,
}

impl BinStats {
    /// Per-bin calibration gap (`acc - conf`); zero everywhere means a
    /// perfectly calibrated model.
    pub fn difference_to_mean_confidence(&self) -> f64 {
        self.acc - self.conf
    }
}

/// ECE plus the per-bin statistics it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct EceReport {
    pub ece: f64,
    /// Non-empty bins in edge order.
    pub bins: Vec<BinStats>,
}

/// `n_bins + 1` equally spaced edges from `1/class_count` to 1.
pub fn uniform_bin_edges(class_count: usize, n_bins: usize) -> Result<BinScheme> {
    if class_count < 2 {
        return Err(Error::InvalidConfig(format!(
            "class_count must be >= 2, got {class_count}"
        )));
    }
    if n_bins < 1 {
        return Err(Error::InvalidConfig("n_bins must be >= 1".into()));
    }
    let low = 1.0 / class_count as f64;
    let width = (1.0 - low) / n_bins as f64;
    let mut edges: Vec<f64> = (0..n_bins).map(|i| low + i as f64 * width).collect();
    edges.push(1.0);
    Ok(BinScheme {
        edges,
        kind: BinKind::Uniform,
    })
}

/// Quantile edges splitting `confidences` into `n_bins` groups whose sizes
/// differ by at most one. The first edge is `1/class_count`, the last is 1;
/// interior edges sit at the first confidence of each group and may repeat
/// when the data is heavily tied.
pub fn adaptive_bin_edges(
    confidences: &[f64],
    class_count: usize,
    n_bins: usize,
) -> Result<BinScheme> {
    if confidences.is_empty() {
        return Err(Error::EmptyInput("confidences for adaptive binning"));
    }
    if class_count < 2 {
        return Err(Error::InvalidConfig(format!(
            "class_count must be >= 2, got {class_count}"
        )));
    }
    if n_bins < 1 {
        return Err(Error::InvalidConfig("n_bins must be >= 1".into()));
    }
    let mut sorted = confidences.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut edges = Vec::with_capacity(n_bins + 1);
    edges.push(1.0 / class_count as f64);
    let mut cumulative = 0usize;
    for size in bin_populations(sorted.len(), n_bins).iter().take(n_bins - 1) {
        cumulative += size;
        edges.push(sorted[cumulative]);
    }
    edges.push(1.0);
    Ok(BinScheme {
        edges,
        kind: BinKind::Adaptive,
    })
}

/// Group sizes for `n` samples over `n_bins` equal-population bins;
/// the remainder goes to the earliest bins.
fn bin_populations(n: usize, n_bins: usize) -> Vec<usize> {
    let base = n / n_bins;
    let extra = n % n_bins;
    (0..n_bins).map(|i| base + usize::from(i < extra)).collect()
}

/// Bin index per frame. Uniform schemes assign by value over half-open
/// intervals `[e_i, e_{i+1})` with the last bin closed; confidences within
/// `1e-6` below the first edge are clamped into bin 0 (row-sum tolerance),
/// anything lower is an error. Adaptive schemes assign by stable confidence
/// rank so every bin receives its quota.
fn assign_bins(frames: &[ScoredFrame], scheme: &BinScheme) -> Result<Vec<usize>> {
    match scheme.kind {
        BinKind::Uniform => {
            let low = scheme.edges[0];
            frames
                .iter()
                .map(|f| {
                    if f.confidence < low - 1e-6 || f.confidence > 1.0 + 1e-6 {
                        return Err(Error::ConfidenceBelowRange {
                            confidence: f.confidence,
                            edge: low,
                        });
                    }
                    let idx = scheme
                        .edges
                        .partition_point(|e| *e <= f.confidence)
                        .saturating_sub(1);
                    Ok(idx.min(scheme.num_bins() - 1))
                })
                .collect()
        }
        BinKind::Adaptive => {
            let mut order: Vec<usize> = (0..frames.len()).collect();
            order.sort_by(|&a, &b| frames[a].confidence.total_cmp(&frames[b].confidence));
            let mut bins = vec![0usize; frames.len()];
            let mut cursor = 0usize;
            for (bin, size) in bin_populations(frames.len(), scheme.num_bins())
                .iter()
                .enumerate()
            {
                for &frame_idx in &order[cursor..cursor + size] {
                    bins[frame_idx] = bin;
                }
                cursor += size;
            }
            Ok(bins)
        }
    }
}

#[derive(Default, Clone)]
struct BinAccumulator {
    count: usize,
    correct: usize,
    conf_sum: f64,
    errors: u64,
    speech: u64,
    has_counts: bool,
}

fn aggregate(frames: &[ScoredFrame], scheme: &BinScheme) -> Result<Vec<(usize, BinAccumulator)>> {
    if frames.is_empty() {
        return Err(Error::EmptyInput("scored frames"));
    }
    let assignment = assign_bins(frames, scheme)?;
    let mut accumulators = vec![BinAccumulator::default(); scheme.num_bins()];
    for (frame, &bin) in frames.iter().zip(&assignment) {
        let acc = &mut accumulators[bin];
        acc.count += 1;
        acc.correct += usize::from(frame.correct);
        acc.conf_sum += frame.confidence;
        if let Some(c) = frame.counts {
            acc.has_counts = true;
            acc.errors += u64::from(c.false_alarm) + u64::from(c.missed) + u64::from(c.confusion);
            acc.speech += u64::from(c.speech);
        }
    }
    Ok(accumulators
        .into_iter()
        .enumerate()
        .filter(|(_, a)| a.count > 0)
        .collect())
}

fn stats_for(bin: usize, acc: &BinAccumulator, total: usize, scheme: &BinScheme) -> BinStats {
    BinStats {
        bin_low: scheme.edges[bin],
        bin_high: scheme.edges[bin + 1],
        count: acc.count,
        prop: acc.count as f64 / total as f64,
        acc: acc.correct as f64 / acc.count as f64,
        conf: acc.conf_sum / acc.count as f64,
        der: (acc.has_counts && acc.speech > 0).then(|| acc.errors as f64 / acc.speech as f64),
    }
}

/// ECE and per-bin statistics. Returns an error for an empty frame list or,
/// with uniform schemes, a confidence below the lowest edge.
pub fn compute_ece(frames: &[ScoredFrame], scheme: &BinScheme) -> Result<EceReport> {
    let aggregated = aggregate(frames, scheme)?;
    let total = frames.len();
    let mut ece = 0.0f64;
    let mut bins = Vec::with_capacity(aggregated.len());
    for (bin, acc) in &aggregated {
        let stats = stats_for(*bin, acc, total, scheme);
        ece += stats.prop * (stats.acc - stats.conf).abs();
        bins.push(stats);
    }
    Ok(EceReport { ece, bins })
}

/// Per-bin reliability data (non-empty bins only). The plotted
/// "difference to mean confidence" of a bin is
/// [`BinStats::difference_to_mean_confidence`].
pub fn reliability_diagram(frames: &[ScoredFrame], scheme: &BinScheme) -> Result<Vec<BinStats>> {
    Ok(compute_ece(frames, scheme)?.bins)
}

/// Per-bin DER: error counts over reference speech of the frames assigned to
/// each bin. Bins without reference speech report no DER.
pub fn binwise_der(frames: &[ScoredFrame], scheme: &BinScheme) -> Result<Vec<BinStats>> {
    Ok(compute_ece(frames, scheme)?.bins)
}

/// Writes bins as the `bin_low,bin_high,prop,acc,conf,der` CSV (der left
/// empty when undefined).
pub fn write_bin_csv<W: std::io::Write>(bins: &[BinStats], mut writer: W) -> std::io::Result<()> {
    writeln!(writer, "bin_low,bin_high,prop,acc,conf,der")?;
    for b in bins {
        let der = b.der.map_or(String::new(), |d| format!("{d:.6}"));
        writeln!(
            writer,
            "{:.6},{:.6},{:.6},{:.6},{:.6},{}",
            b.bin_low, b.bin_high, b.prop, b.acc, b.conf, der
        )?;
    }
    Ok(())
}

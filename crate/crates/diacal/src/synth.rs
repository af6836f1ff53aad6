//! Synthetic conversations and posterior tracks with controllable error
//! placement and calibration distortion.
//!
//! The generator is calibrated by construction: each frame draws a governing
//! confidence `c` and is correct with probability `c`, so empirical accuracy
//! conditioned on confidence converges to the confidence itself. Distortion
//! and per-region overrides then create overconfident models or localized
//! low-confidence / high-error zones on demand.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::annotations::{rasterize_full, AnnotationSet, FrameGrid, SegmentAnnotation};
use crate::error::{Error, Result};
use crate::labels::PowersetMapping;
use crate::posteriors::PosteriorTrack;

/// Parameters of one synthetic conversation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConversationParams {
    pub file_id: String,
    pub n_speakers: usize,
    /// File length in seconds.
    pub duration: f64,
    /// Per-second probability of an inactive speaker starting to talk.
    pub turn_on_rate: f64,
    /// Per-second probability of an active speaker stopping.
    pub turn_off_rate: f64,
    /// Coupling weight >= 0: while someone else talks, a speaker's turn-on
    /// probability is scaled by `1 + overlap_bias` and its turn-off
    /// probability divided by the same factor. Zero keeps chains
    /// independent.
    pub overlap_bias: f64,
    pub seed: u64,
}

impl ConversationParams {
    fn validate(&self) -> Result<()> {
        if self.n_speakers == 0 {
            return Err(Error::InvalidConfig("n_speakers must be >= 1".into()));
        }
        if !self.duration.is_finite() || self.duration <= 0.0 {
            return Err(Error::InvalidConfig("duration must be > 0".into()));
        }
        for (name, rate) in [
            ("turn_on_rate", self.turn_on_rate),
            ("turn_off_rate", self.turn_off_rate),
        ] {
            if !rate.is_finite() || !(0.0..1.0).contains(&rate) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be in [0, 1), got {rate}"
                )));
            }
        }
        if !self.overlap_bias.is_finite() || self.overlap_bias < 0.0 {
            return Err(Error::InvalidConfig("overlap_bias must be >= 0".into()));
        }
        Ok(())
    }
}

/// Beta distribution parameters for confidence draws.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BetaParams {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for BetaParams {
    /// High-confidence-skewed draw resembling a converged model.
    fn default() -> Self {
        Self {
            alpha: 5.0,
            beta: 1.2,
        }
    }
}

/// A span where the generator's behavior is overridden.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorRegion {
    pub start: f64,
    pub end: f64,
    /// Correctness probability replacing the governing confidence inside the
    /// region. With the reported confidence left untouched this creates a
    /// miscalibrated zone.
    #[serde(default)]
    pub degraded_accuracy: Option<f64>,
    /// Confidence distribution replacing the base one inside the region,
    /// e.g. to create a genuine low-confidence dip.
    #[serde(default)]
    pub confidence: Option<BetaParams>,
}

/// How confidences and correctness are generated.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationProfile {
    /// Base distribution of the governing confidence, scaled into `[1/C, 1]`.
    pub confidence: BetaParams,
    /// Optional piecewise-linear map from governing confidence to
    /// correctness probability; identity when absent (calibrated).
    #[serde(default)]
    pub accuracy_curve: Option<Vec<(f64, f64)>>,
    /// Reported confidence = governing^(1/gamma). Gamma of 1 reports the
    /// governing confidence unchanged; above 1 sharpens the reports above
    /// the true accuracy (overconfidence), below 1 flattens them.
    pub distortion_gamma: f64,
    #[serde(default)]
    pub error_regions: Vec<ErrorRegion>,
}

impl Default for CalibrationProfile {
    fn default() -> Self {
        Self {
            confidence: BetaParams::default(),
            accuracy_curve: None,
            distortion_gamma: 1.0,
            error_regions: Vec::new(),
        }
    }
}

impl CalibrationProfile {
    /// Calibrated profile with the given confidence distribution.
    pub fn calibrated(confidence: BetaParams) -> Self {
        Self {
            confidence,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        for params in [self.confidence]
            .iter()
            .chain(self.error_regions.iter().filter_map(|r| r.confidence.as_ref()))
        {
            if !positive(params.alpha) || !positive(params.beta) {
                return Err(Error::InvalidConfig(
                    "beta parameters must be > 0".into(),
                ));
            }
        }
        if !positive(self.distortion_gamma) {
            return Err(Error::InvalidConfig("distortion_gamma must be > 0".into()));
        }
        if let Some(curve) = &self.accuracy_curve {
            if curve.is_empty() {
                return Err(Error::InvalidConfig("accuracy_curve must be non-empty".into()));
            }
            for window in curve.windows(2) {
                if window[1].0 < window[0].0 {
                    return Err(Error::InvalidConfig(
                        "accuracy_curve knots must be sorted by confidence".into(),
                    ));
                }
            }
            if curve.iter().any(|&(_, y)| !(0.0..=1.0).contains(&y)) {
                return Err(Error::InvalidConfig(
                    "accuracy_curve values must lie in [0, 1]".into(),
                ));
            }
        }
        for region in &self.error_regions {
            let ordered =
                region.start.is_finite() && region.end.is_finite() && region.start < region.end;
            if !ordered {
                return Err(Error::InvalidConfig(format!(
                    "error region [{}, {}) is empty",
                    region.start, region.end
                )));
            }
            if let Some(a) = region.degraded_accuracy {
                if !(0.0..=1.0).contains(&a) {
                    return Err(Error::InvalidConfig(format!(
                        "degraded_accuracy must be in [0, 1], got {a}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn accuracy_at(&self, governing: f64) -> f64 {
        match &self.accuracy_curve {
            None => governing,
            Some(curve) => {
                if governing <= curve[0].0 {
                    return curve[0].1;
                }
                if governing >= curve[curve.len() - 1].0 {
                    return curve[curve.len() - 1].1;
                }
                for window in curve.windows(2) {
                    let (x0, y0) = window[0];
                    let (x1, y1) = window[1];
                    if governing <= x1 {
                        if x1 == x0 {
                            return y1;
                        }
                        let w = (governing - x0) / (x1 - x0);
                        return y0 + w * (y1 - y0);
                    }
                }
                curve[curve.len() - 1].1
            }
        }
    }
}

/// Samples per-speaker two-state Markov chains at frame resolution and
/// merges the active runs into segments. Deterministic per seed.
pub fn gen_reference(params: &ConversationParams, frame_rate: f64) -> Result<AnnotationSet> {
    params.validate()?;
    let grid = FrameGrid::for_duration(frame_rate, params.duration)?;
    let frame_dur = grid.frame_duration();
    let p_on = (params.turn_on_rate * frame_dur).min(0.999);
    let p_off = (params.turn_off_rate * frame_dur).min(0.999);
    let bias = 1.0 + params.overlap_bias;

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut active = vec![false; params.n_speakers];
    let mut run_start: Vec<Option<usize>> = vec![None; params.n_speakers];
    let mut set = AnnotationSet::new();
    let close_run = |set: &mut AnnotationSet, s: usize, start: usize, end: usize| {
        let seg = SegmentAnnotation::new(
            &params.file_id,
            &format!("spk{s:02}"),
            grid.frame_start(start),
            (end - start) as f64 * frame_dur,
        )
        .expect("positive run duration");
        set.push(seg);
    };
    for t in 0..grid.num_frames {
        let prev = active.clone();
        for s in 0..params.n_speakers {
            let others_talking = prev.iter().enumerate().any(|(i, &a)| i != s && a);
            let u: f64 = rng.random();
            active[s] = if prev[s] {
                let p = if others_talking { p_off / bias } else { p_off };
                u >= p
            } else {
                let p = if others_talking {
                    (p_on * bias).min(0.999)
                } else {
                    p_on
                };
                u < p
            };
            match (run_start[s], active[s]) {
                (None, true) => run_start[s] = Some(t),
                (Some(start), false) => {
                    close_run(&mut set, s, start, t);
                    run_start[s] = None;
                }
                _ => {}
            }
        }
    }
    for (s, start) in run_start.iter().enumerate() {
        if let Some(start) = start {
            close_run(&mut set, s, *start, grid.num_frames);
        }
    }
    Ok(set)
}

/// Generates a posterior track for a reference conversation.
///
/// Per frame: draw a governing confidence `c` from the (possibly
/// region-overridden) Beta distribution scaled into `[1/C, 1]`; the frame is
/// correct with probability `c` (or the region's degraded accuracy, or the
/// profile's accuracy curve at `c`), in which case the argmax lands on the
/// true powerset class, otherwise on a uniformly drawn wrong class. The
/// reported top probability is `c^(1/gamma)` and the remaining mass is
/// spread uniformly over the other classes, keeping the top entry the strict
/// maximum.
#[allow(clippy::too_many_arguments)]
pub fn gen_posteriors(
    reference: &AnnotationSet,
    file_id: &str,
    mapping: &PowersetMapping,
    profile: &CalibrationProfile,
    grid: &FrameGrid,
    window_length: f32,
    window_stride: f32,
    seed: u64,
) -> Result<PosteriorTrack> {
    profile.validate()?;
    let raster = rasterize_full(reference, file_id, grid);
    let k = mapping.config().max_speakers();
    if raster.num_speakers() > k {
        return Err(Error::InvalidConfig(format!(
            "reference has {} speakers but the mapping supports {k}",
            raster.num_speakers()
        )));
    }
    let c = mapping.num_classes();
    let low = 1.0 / c as f64;
    let base_beta = beta_dist(&profile.confidence)?;
    let region_betas: Vec<Option<Beta<f64>>> = profile
        .error_regions
        .iter()
        .map(|r| r.confidence.as_ref().map(beta_dist).transpose())
        .collect::<Result<_>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<f32> = Vec::with_capacity(grid.num_frames * c);
    for t in 0..grid.num_frames {
        let mut activity = vec![false; k];
        for (s, &on) in raster.activity[t].iter().enumerate() {
            activity[s] = on;
        }
        let true_class = mapping.multilabel_to_class(&activity);

        let midpoint = (t as f64 + 0.5) * grid.frame_duration();
        let region = profile
            .error_regions
            .iter()
            .position(|r| midpoint >= r.start && midpoint < r.end);
        let beta = region
            .and_then(|i| region_betas[i].as_ref())
            .unwrap_or(&base_beta);
        let governing = (low + (1.0 - low) * beta.sample(&mut rng))
            .clamp(low + 1e-6, 1.0 - 1e-6);
        let acc_prob = region
            .and_then(|i| profile.error_regions[i].degraded_accuracy)
            .unwrap_or_else(|| profile.accuracy_at(governing));
        // Fixed draw count per frame: the wrong-class draw happens even for
        // correct frames so that tracks generated with the same seed but
        // different accuracies stay frame-aligned.
        let correct = rng.random::<f64>() < acc_prob;
        let wrong = rng.random_range(0..c - 1);
        let predicted = if correct {
            true_class
        } else if wrong >= true_class {
            wrong + 1
        } else {
            wrong
        };

        let reported = governing
            .powf(1.0 / profile.distortion_gamma)
            .clamp(low + 1e-6, 1.0 - 1e-6);
        let others = ((1.0 - reported) / (c - 1) as f64) as f32;
        let row_start = rows.len();
        rows.resize(row_start + c, others);
        let tail = f64::from(others) * (c - 1) as f64;
        rows[row_start + predicted] = (1.0 - tail) as f32;
    }
    PosteriorTrack::new(file_id, *grid, c, rows, window_length, window_stride)
}

fn beta_dist(params: &BetaParams) -> Result<Beta<f64>> {
    Beta::new(params.alpha, params.beta)
        .map_err(|e| Error::InvalidConfig(format!("invalid beta parameters: {e}")))
}

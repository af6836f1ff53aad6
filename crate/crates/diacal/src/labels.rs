//! Powerset label space: the ordered set of speaker-subset classes and
//! conversions between class indices and multilabel activity vectors.
//!
//! A powerset segmentation model predicts one class per frame, where each
//! class denotes a *subset* of simultaneously active speakers. With up to
//! `K` distinct speakers and at most `S` of them active at once, there are
//! `sum_{i=0..=S} C(K, i)` classes. The canonical `K = 3`, `S = 2`
//! configuration yields 7 classes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Size limits of the powerset label space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowersetConfig {
    max_speakers: usize,
    max_simultaneous: usize,
}

impl PowersetConfig {
    /// `max_speakers` = K distinct speakers, `max_simultaneous` = S ≤ K
    /// concurrently active ones. Both must be strictly positive.
    pub fn new(max_speakers: usize, max_simultaneous: usize) -> Result<Self> {
        if max_speakers == 0 {
            return Err(Error::InvalidConfig("max_speakers must be >= 1".into()));
        }
        if max_simultaneous == 0 || max_simultaneous > max_speakers {
            return Err(Error::InvalidConfig(format!(
                "max_simultaneous must be in 1..={max_speakers}, got {max_simultaneous}"
            )));
        }
        if max_speakers > 16 {
            return Err(Error::InvalidConfig(
                "max_speakers above 16 is not supported".into(),
            ));
        }
        Ok(Self {
            max_speakers,
            max_simultaneous,
        })
    }

    pub fn max_speakers(&self) -> usize {
        self.max_speakers
    }

    pub fn max_simultaneous(&self) -> usize {
        self.max_simultaneous
    }
}

/// The ordered class list of a powerset label space.
///
/// Classes are speaker-index subsets ordered by (size, lexicographic
/// indices): class 0 is the empty set (silence), then all singletons in
/// index order, then all pairs, and so on up to size `S`. Each subset is
/// stored as a bitmask over speaker indices `0..K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowersetMapping {
    config: PowersetConfig,
    classes: Vec<u32>,
}

/// The predicted class of one frame together with its probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopLabel {
    /// Index into the mapping's class list.
    pub class_index: usize,
    /// Probability of the predicted class; at least `1/C` for a valid
    /// probability vector over `C` classes.
    pub confidence: f64,
}

/// Builds the deterministic class ordering for a configuration.
pub fn build_powerset_mapping(config: PowersetConfig) -> PowersetMapping {
    let k = config.max_speakers();
    let s = config.max_simultaneous();
    let mut classes: Vec<u32> = (0u32..1 << k)
        .filter(|m| (m.count_ones() as usize) <= s)
        .collect();
    let members = |m: u32| -> Vec<usize> { (0..k).filter(|i| m & (1 << i) != 0).collect() };
    classes.sort_by_key(|&m| (m.count_ones(), members(m)));
    PowersetMapping { config, classes }
}

impl PowersetMapping {
    pub fn config(&self) -> PowersetConfig {
        self.config
    }

    /// Number of classes `C`.
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Speaker indices of a class, ascending.
    pub fn class_members(&self, class_index: usize) -> Result<Vec<usize>> {
        let mask = self.class_mask(class_index)?;
        Ok((0..self.config.max_speakers())
            .filter(|i| mask & (1 << i) != 0)
            .collect())
    }

    fn class_mask(&self, class_index: usize) -> Result<u32> {
        self.classes.get(class_index).copied().ok_or_else(|| {
            Error::InvalidConfig(format!(
                "class index {class_index} out of range (C = {})",
                self.num_classes()
            ))
        })
    }

    /// Decodes a class index into a binary activity vector of length `K`.
    pub fn class_to_multilabel(&self, class_index: usize) -> Result<Vec<bool>> {
        let mask = self.class_mask(class_index)?;
        Ok((0..self.config.max_speakers())
            .map(|i| mask & (1 << i) != 0)
            .collect())
    }

    /// Encodes an activity vector of length `K` into its class index.
    ///
    /// If more than `S` speakers are active, the vector is capped to the
    /// `S` active speakers with the lowest indices before lookup. Callers
    /// index speakers by prominence (descending speech duration), so the
    /// capping keeps the most prominent ones.
    pub fn multilabel_to_class(&self, activity: &[bool]) -> usize {
        assert_eq!(
            activity.len(),
            self.config.max_speakers(),
            "activity vector length must equal max_speakers"
        );
        let mut mask: u32 = 0;
        let mut active = 0;
        for (i, &on) in activity.iter().enumerate() {
            if on && active < self.config.max_simultaneous() {
                mask |= 1 << i;
                active += 1;
            }
        }
        let k = self.config.max_speakers();
        let key = |m: u32| -> (u32, Vec<usize>) {
            (m.count_ones(), (0..k).filter(|i| m & (1 << i) != 0).collect())
        };
        self.classes
            .binary_search_by_key(&key(mask), |&m| key(m))
            .expect("capped activity mask is always a valid class")
    }

    /// Argmax class and its probability for one posterior row.
    ///
    /// The row must have length `C`, non-negative entries, and sum to 1
    /// within `1e-6`. Ties break toward the lowest class index.
    pub fn top_label(&self, probabilities: &[f32]) -> Result<TopLabel> {
        if probabilities.len() != self.num_classes() {
            return Err(Error::InvalidRow {
                row: 0,
                reason: format!(
                    "expected {} probabilities, got {}",
                    self.num_classes(),
                    probabilities.len()
                ),
            });
        }
        let mut sum = 0.0f64;
        let mut best = 0usize;
        let mut best_p = f32::NEG_INFINITY;
        for (i, &p) in probabilities.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidRow {
                    row: 0,
                    reason: format!("entry {i} is {p}"),
                });
            }
            sum += f64::from(p);
            if p > best_p {
                best_p = p;
                best = i;
            }
        }
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidRow {
                row: 0,
                reason: format!("row sums to {sum}, not 1"),
            });
        }
        Ok(TopLabel {
            class_index: best,
            confidence: f64::from(best_p),
        })
    }
}

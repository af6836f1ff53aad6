//! Calibration and local-DER analysis for powerset speaker-diarization
//! posteriors.
//!
//! The crate evaluates how well a powerset segmentation model's confidence
//! tracks its accuracy (top-label calibration), decomposes its frame-level
//! diarization error after per-window speaker alignment, and uses confidence
//! to pick annotation-efficient training and validation subsets:
//!
//! - [`labels`] — the powerset class space and its multilabel conversions.
//! - [`annotations`] — RTTM reference annotations and frame rasterization.
//! - [`posteriors`] — posterior tracks and the `PST1` binary format.
//! - [`calibration`] — ECE, reliability diagrams, binwise DER.
//! - [`der`] — per-window speaker alignment and local DER breakdowns.
//! - [`selection`] — confidence-based region selection and budget curves.
//! - [`adaptation`] — oracle labeling, training manifests, and minimal
//!   validation subsets for checkpoint selection.
//! - [`synth`] — seeded synthetic conversations and posterior tracks.
//! - [`cli`] — run configuration and the workflows behind the `diacal`
//!   binary.
//!
//! Every major capability has a runnable demo under `examples/`; start with
//! `cargo run --example calibration_report`.

pub mod adaptation;
pub mod annotations;
pub mod assignment;
pub mod calibration;
pub mod cli;
pub mod der;
pub mod error;
pub mod labels;
pub mod posteriors;
pub mod selection;
pub mod synth;

pub use annotations::{parse_rttm, write_rttm, AnnotationSet, FrameGrid, SegmentAnnotation};
pub use calibration::{
    adaptive_bin_edges, binwise_der, compute_ece, reliability_diagram, uniform_bin_edges,
    BinScheme, BinStats, ScoredFrame,
};
pub use der::{local_der, optimal_speaker_mapping, DerBreakdown, SpeakerMapping};
pub use error::{Error, Result};
pub use labels::{build_powerset_mapping, PowersetConfig, PowersetMapping, TopLabel};
pub use posteriors::{read_posteriors, write_posteriors, PosteriorTrack};
pub use selection::{select_regions, Region, SelectionStrategy, StrategyKind};
pub use synth::{gen_posteriors, gen_reference, CalibrationProfile, ConversationParams};

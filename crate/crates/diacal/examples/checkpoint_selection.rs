//! Minimal validation subsets: how much annotated validation data does it
//! take to pick (almost) the best checkpoint from a fixed set?
//!
//! Five checkpoints share their behavior everywhere except inside a few
//! low-confidence stretches, where their accuracy differs. The experiment
//! selects validation regions under growing budgets — randomly and by worst
//! confidence — picks the checkpoint with the best subset DER, and reports
//! the relative DER gap to the true best checkpoint.
//!
//! ```bash
//! cargo run --example checkpoint_selection
//! ```

use diacal::adaptation::{evaluate_minimal_validation, CheckpointSet, ValidationConfig};
use diacal::annotations::{FrameGrid, DEFAULT_FRAME_RATE};
use diacal::labels::{build_powerset_mapping, PowersetConfig};
use diacal::selection::StrategyKind;
use diacal::synth::{
    gen_posteriors, gen_reference, BetaParams, CalibrationProfile, ConversationParams, ErrorRegion,
};

fn main() -> diacal::Result<()> {
    let mapping = build_powerset_mapping(PowersetConfig::new(3, 2)?);
    let params = ConversationParams {
        file_id: "val".into(),
        n_speakers: 2,
        duration: 600.0,
        turn_on_rate: 0.12,
        turn_off_rate: 0.2,
        overlap_bias: 0.3,
        seed: 31,
    };
    let reference = gen_reference(&params, DEFAULT_FRAME_RATE)?;
    let grid = FrameGrid::for_duration(DEFAULT_FRAME_RATE, params.duration)?;

    let dip = |start: f64, accuracy: f64| ErrorRegion {
        start,
        end: start + 5.0,
        degraded_accuracy: Some(accuracy),
        confidence: Some(BetaParams {
            alpha: 1.2,
            beta: 6.0,
        }),
    };
    let mut entries = Vec::new();
    for (id, accuracy) in [
        ("epoch-02", 0.30),
        ("epoch-04", 0.55),
        ("epoch-06", 0.90), // the true best
        ("epoch-08", 0.70),
        ("epoch-10", 0.45), // overfitted again
    ] {
        let profile = CalibrationProfile {
            confidence: BetaParams {
                alpha: 10.0,
                beta: 0.9,
            },
            error_regions: [70.0, 180.0, 320.0, 470.0]
                .iter()
                .map(|&s| dip(s, accuracy))
                .collect(),
            ..CalibrationProfile::default()
        };
        // Same generation seed: checkpoints differ only inside the dips.
        let track = gen_posteriors(&reference, "val", &mapping, &profile, &grid, 5.0, 5.0, 64)?;
        entries.push((id.to_string(), vec![track]));
    }
    let checkpoints = CheckpointSet::new(entries)?;

    let config = ValidationConfig {
        budgets: vec![15.0, 30.0, 60.0, 120.0, 300.0],
        strategies: vec![StrategyKind::WorstConfidence, StrategyKind::Random],
        n_trials: 10,
        base_checkpoint: "epoch-02".into(),
        region_length: 7.5,
        stride: 2.5,
        seed: 8,
    };
    let report = evaluate_minimal_validation(&checkpoints, &reference, &mapping, &config)?;
    println!(
        "true best checkpoint: {} (full-set DER {:.4})\n",
        report.best_checkpoint, report.der_best
    );
    println!(
        "{:>9} {:>17} {:>8} {:>13} {:>12}",
        "budget", "strategy", "trials", "mean rel diff", "max rel diff"
    );
    for s in &report.summary {
        println!(
            "{:>8.0}s {:>17} {:>8} {:>12.1}% {:>11.1}%",
            s.budget_s,
            s.strategy.to_string(),
            s.trials,
            100.0 * s.mean_rel_diff,
            100.0 * s.max_rel_diff
        );
    }
    Ok(())
}

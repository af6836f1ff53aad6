//! Pick annotation regions under a time budget: lowest mean-confidence
//! chunks first versus the seeded random baseline.
//!
//! The synthetic track has two low-confidence dips; worst-confidence
//! selection should find them before spending budget anywhere else.
//!
//! ```bash
//! cargo run --example select_regions
//! ```

use diacal::annotations::{FrameGrid, DEFAULT_FRAME_RATE};
use diacal::labels::{build_powerset_mapping, PowersetConfig};
use diacal::selection::{select_regions, SelectionStrategy};
use diacal::synth::{
    gen_posteriors, gen_reference, BetaParams, CalibrationProfile, ConversationParams, ErrorRegion,
};

fn main() -> diacal::Result<()> {
    let mapping = build_powerset_mapping(PowersetConfig::new(3, 2)?);
    let params = ConversationParams {
        file_id: "budgeted".into(),
        n_speakers: 2,
        duration: 400.0,
        turn_on_rate: 0.1,
        turn_off_rate: 0.25,
        overlap_bias: 0.3,
        seed: 21,
    };
    let reference = gen_reference(&params, DEFAULT_FRAME_RATE)?;
    let grid = FrameGrid::for_duration(DEFAULT_FRAME_RATE, params.duration)?;
    let dips = [(90.0, 105.0), (260.0, 275.0)];
    let profile = CalibrationProfile {
        error_regions: dips
            .iter()
            .map(|&(start, end)| ErrorRegion {
                start,
                end,
                degraded_accuracy: Some(0.3),
                confidence: Some(BetaParams {
                    alpha: 1.2,
                    beta: 5.0,
                }),
            })
            .collect(),
        ..CalibrationProfile::default()
    };
    let track = gen_posteriors(&reference, "budgeted", &mapping, &profile, &grid, 5.0, 5.0, 5)?;

    let budget = 30.0;
    for strategy in [
        SelectionStrategy::worst_confidence(),
        SelectionStrategy::random(13),
    ] {
        let selection = select_regions(&[&track], &strategy, budget)?;
        println!(
            "== {} (budget {budget} s, selected {:.1} s) ==",
            strategy.kind, selection.selected_seconds
        );
        for (region, score) in selection.regions.iter().zip(&selection.scores) {
            let in_dip = dips
                .iter()
                .any(|&(lo, hi)| region.start < hi && lo < region.end);
            println!(
                "  [{:>6.1}, {:>6.1}]  mean confidence {:.3}{}",
                region.start,
                region.end,
                score,
                if in_dip { "  <- inside a dip" } else { "" }
            );
        }
    }
    Ok(())
}

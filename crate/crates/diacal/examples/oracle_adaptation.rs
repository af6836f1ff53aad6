//! Simulated annotation for domain adaptation: select low-confidence
//! regions under a budget, reveal the withheld reference inside them, and
//! emit the training manifest a retraining run would consume.
//!
//! ```bash
//! cargo run --example oracle_adaptation
//! ```

use diacal::adaptation::{emit_training_manifest, oracle_label, read_training_manifest};
use diacal::annotations::{FrameGrid, DEFAULT_FRAME_RATE};
use diacal::labels::{build_powerset_mapping, PowersetConfig};
use diacal::selection::{select_regions, SelectionStrategy};
use diacal::synth::{gen_posteriors, gen_reference, CalibrationProfile, ConversationParams};

fn main() -> diacal::Result<()> {
    let mapping = build_powerset_mapping(PowersetConfig::new(3, 2)?);
    let mut withheld = diacal::AnnotationSet::new();
    let mut tracks = Vec::new();
    for (file_id, seed) in [("dom-a", 4u64), ("dom-b", 5u64)] {
        let params = ConversationParams {
            file_id: file_id.to_string(),
            n_speakers: 2,
            duration: 300.0,
            turn_on_rate: 0.09,
            turn_off_rate: 0.22,
            overlap_bias: 0.4,
            seed,
        };
        let reference = gen_reference(&params, DEFAULT_FRAME_RATE)?;
        let grid = FrameGrid::for_duration(DEFAULT_FRAME_RATE, params.duration)?;
        tracks.push(gen_posteriors(
            &reference,
            file_id,
            &mapping,
            &CalibrationProfile::default(),
            &grid,
            5.0,
            5.0,
            seed + 50,
        )?);
        withheld.extend(reference);
    }

    // The annotation budgets of a small adaptation study.
    let refs: Vec<&diacal::PosteriorTrack> = tracks.iter().collect();
    for budget in [30.0, 150.0, 1200.0] {
        let selection = select_regions(&refs, &SelectionStrategy::worst_confidence(), budget)?;
        let result = oracle_label(&selection.regions, &withheld)?;
        println!(
            "budget {budget:>6.0} s -> {} regions, {:.1} s annotated, {} revealed segments{}",
            result.regions.len(),
            result.total_annotated,
            result.annotations.len(),
            if selection.shortfall { " (shortfall)" } else { "" },
        );
        if budget == 150.0 {
            let out = std::env::temp_dir().join("diacal-examples/oracle_adaptation");
            let paths = emit_training_manifest(&result, &out)?;
            let manifest = read_training_manifest(&paths[0])?;
            println!(
                "  manifest: {} regions, {:.1} s -> {}",
                manifest.regions.len(),
                manifest.total_seconds,
                paths[0].display()
            );
        }
    }
    Ok(())
}

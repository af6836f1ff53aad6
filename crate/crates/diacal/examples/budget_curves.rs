//! Budget curves: how cumulative DER and the nonspeech/speech/overlap
//! composition evolve as lowest-confidence regions are selected first,
//! against the whole-set baselines.
//!
//! Writes the two CSVs the `curves` subcommand produces and prints a
//! digest.
//!
//! ```bash
//! cargo run --example budget_curves
//! ```

use diacal::annotations::{FrameGrid, DEFAULT_FRAME_RATE};
use diacal::labels::{build_powerset_mapping, PowersetConfig};
use diacal::selection::{
    budget_curves, select_regions, write_curves_csv, write_whole_set_csv, SelectionStrategy,
};
use diacal::synth::{
    gen_posteriors, gen_reference, BetaParams, CalibrationProfile, ConversationParams, ErrorRegion,
};

fn main() -> diacal::Result<()> {
    let mapping = build_powerset_mapping(PowersetConfig::new(3, 2)?);
    let params = ConversationParams {
        file_id: "curve".into(),
        n_speakers: 3,
        duration: 600.0,
        turn_on_rate: 0.1,
        turn_off_rate: 0.22,
        overlap_bias: 0.8,
        seed: 2,
    };
    let reference = gen_reference(&params, DEFAULT_FRAME_RATE)?;
    let grid = FrameGrid::for_duration(DEFAULT_FRAME_RATE, params.duration)?;
    let profile = CalibrationProfile {
        error_regions: [60.0, 200.0, 340.0, 480.0]
            .iter()
            .map(|&start| ErrorRegion {
                start,
                end: start + 15.0,
                degraded_accuracy: Some(0.25),
                confidence: Some(BetaParams {
                    alpha: 1.5,
                    beta: 5.0,
                }),
            })
            .collect(),
        ..CalibrationProfile::default()
    };
    let track = gen_posteriors(&reference, "curve", &mapping, &profile, &grid, 5.0, 5.0, 19)?;

    // Order every selectable region by confidence, then trace the curve.
    let selection = select_regions(
        &[&track],
        &SelectionStrategy::worst_confidence(),
        params.duration,
    )?;
    let curves = budget_curves(&selection.regions, &reference, &[&track], &mapping)?;

    let whole_der = curves.whole_breakdown.der().unwrap_or(f64::NAN);
    let (_, _, whole_overlap) = curves.whole_composition.fractions();
    println!("whole set: DER {whole_der:.3}, overlap fraction {whole_overlap:.3}");
    println!("{:>10} {:>8} {:>10}", "seconds", "DER", "overlap");
    for p in curves.points.iter().step_by(8) {
        let (_, _, overlap) = p.composition.fractions();
        println!(
            "{:>10.1} {:>8.3} {:>10.3}",
            p.seconds_selected,
            p.breakdown.der().unwrap_or(f64::NAN),
            overlap
        );
    }

    let out = std::env::temp_dir().join("diacal-examples/budget_curves");
    std::fs::create_dir_all(&out)?;
    let mut bytes = Vec::new();
    write_curves_csv(&curves, &mut bytes)?;
    std::fs::write(out.join("curves.csv"), bytes)?;
    let mut bytes = Vec::new();
    write_whole_set_csv(&curves, params.duration, &mut bytes)?;
    std::fs::write(out.join("whole_set.csv"), bytes)?;
    println!("CSV data under {}", out.display());
    Ok(())
}

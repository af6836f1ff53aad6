//! Measure top-label calibration of a synthetic model: ECE with uniform and
//! adaptive bins, plus the reliability-diagram table.
//!
//! The generator draws a governing confidence per frame and is correct with
//! exactly that probability, so the calibrated run should sit on the
//! diagonal; the sharpened run (gamma = 2) reports inflated confidences and
//! shows up as overconfidence in the top bins.
//!
//! ```bash
//! cargo run --example calibration_report
//! ```

use diacal::annotations::{FrameGrid, DEFAULT_FRAME_RATE};
use diacal::calibration::{adaptive_bin_edges, compute_ece, uniform_bin_edges};
use diacal::der::local_der;
use diacal::labels::{build_powerset_mapping, PowersetConfig};
use diacal::synth::{gen_posteriors, gen_reference, BetaParams, CalibrationProfile, ConversationParams};

fn main() -> diacal::Result<()> {
    let mapping = build_powerset_mapping(PowersetConfig::new(3, 2)?);
    let params = ConversationParams {
        file_id: "demo".into(),
        n_speakers: 2,
        duration: 1200.0,
        turn_on_rate: 0.08,
        turn_off_rate: 0.2,
        overlap_bias: 0.3,
        seed: 7,
    };
    let reference = gen_reference(&params, DEFAULT_FRAME_RATE)?;
    let grid = FrameGrid::for_duration(DEFAULT_FRAME_RATE, params.duration)?;

    for (label, gamma) in [("calibrated (gamma=1)", 1.0), ("sharpened (gamma=2)", 2.0)] {
        let profile = CalibrationProfile {
            confidence: BetaParams {
                alpha: 2.0,
                beta: 1.0,
            },
            distortion_gamma: gamma,
            ..CalibrationProfile::default()
        };
        let track = gen_posteriors(&reference, "demo", &mapping, &profile, &grid, 5.0, 5.0, 11)?;
        let result = local_der(&track, &mapping, &reference)?;

        let uniform = uniform_bin_edges(mapping.num_classes(), 10)?;
        let report = compute_ece(&result.frames, &uniform)?;
        let confidences: Vec<f64> = result.frames.iter().map(|f| f.confidence).collect();
        let adaptive = adaptive_bin_edges(&confidences, mapping.num_classes(), 10)?;
        let adaptive_report = compute_ece(&result.frames, &adaptive)?;

        println!("== {label} ==");
        println!(
            "frames: {}   local DER: {:.3}   ECE uniform: {:.4}   ECE adaptive: {:.4}",
            result.frames.len(),
            result.breakdown.der().unwrap_or(f64::NAN),
            report.ece,
            adaptive_report.ece,
        );
        println!("{:>14} {:>8} {:>8} {:>8} {:>9}", "bin", "count", "conf", "acc", "acc-conf");
        for b in &report.bins {
            println!(
                "[{:.3}, {:.3}] {:>8} {:>8.3} {:>8.3} {:>+9.3}",
                b.bin_low,
                b.bin_high,
                b.count,
                b.conf,
                b.acc,
                b.difference_to_mean_confidence(),
            );
        }
        println!();
    }
    Ok(())
}

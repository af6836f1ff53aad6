//! Score a posterior track against its reference: per-window speaker
//! alignment, the false-alarm / missed / confusion decomposition, and the
//! binwise DER distribution over confidence bins.
//!
//! ```bash
//! cargo run --example local_der
//! ```

use diacal::annotations::{FrameGrid, DEFAULT_FRAME_RATE};
use diacal::calibration::{binwise_der, uniform_bin_edges};
use diacal::der::local_der;
use diacal::labels::{build_powerset_mapping, PowersetConfig};
use diacal::synth::{gen_posteriors, gen_reference, CalibrationProfile, ConversationParams, ErrorRegion};

fn main() -> diacal::Result<()> {
    let mapping = build_powerset_mapping(PowersetConfig::new(3, 2)?);
    let params = ConversationParams {
        file_id: "scored".into(),
        n_speakers: 3,
        duration: 600.0,
        turn_on_rate: 0.1,
        turn_off_rate: 0.22,
        overlap_bias: 0.5,
        seed: 3,
    };
    let reference = gen_reference(&params, DEFAULT_FRAME_RATE)?;
    let grid = FrameGrid::for_duration(DEFAULT_FRAME_RATE, params.duration)?;
    // A degraded stretch in the middle makes the breakdown interesting.
    let profile = CalibrationProfile {
        error_regions: vec![ErrorRegion {
            start: 250.0,
            end: 290.0,
            degraded_accuracy: Some(0.2),
            confidence: None,
        }],
        ..CalibrationProfile::default()
    };
    let track = gen_posteriors(&reference, "scored", &mapping, &profile, &grid, 5.0, 5.0, 17)?;

    let result = local_der(&track, &mapping, &reference)?;
    let b = &result.breakdown;
    println!("frames scored:   {}", result.frames.len());
    println!("false alarm:     {}", b.false_alarm);
    println!("missed:          {}", b.missed);
    println!("confusion:       {}", b.confusion);
    println!("total speech:    {}", b.total_speech);
    println!("local DER:       {:.4}", b.der().unwrap_or(f64::NAN));

    let scheme = uniform_bin_edges(mapping.num_classes(), 10)?;
    println!("\nDER by confidence bin (errors concentrate in low bins):");
    for bin in binwise_der(&result.frames, &scheme)? {
        match bin.der {
            Some(der) => println!(
                "[{:.3}, {:.3}]  frames {:>7}  DER {:.3}",
                bin.bin_low, bin.bin_high, bin.count, der
            ),
            None => println!(
                "[{:.3}, {:.3}]  frames {:>7}  DER undefined (no reference speech)",
                bin.bin_low, bin.bin_high, bin.count
            ),
        }
    }
    Ok(())
}

//! Generate a synthetic dataset on disk: seeded conversations as RTTM
//! references plus matching PST1 posterior tracks.
//!
//! ```bash
//! cargo run --example synth_dataset
//! ```

use diacal::annotations::{FrameGrid, DEFAULT_FRAME_RATE};
use diacal::labels::{build_powerset_mapping, PowersetConfig};
use diacal::synth::{gen_posteriors, gen_reference, CalibrationProfile, ConversationParams};
use diacal::{write_posteriors, write_rttm};

fn main() -> diacal::Result<()> {
    let out = std::env::temp_dir().join("diacal-examples/synth_dataset");
    std::fs::create_dir_all(out.join("rttm"))?;
    std::fs::create_dir_all(out.join("posteriors"))?;

    let mapping = build_powerset_mapping(PowersetConfig::new(3, 2)?);
    let profile = CalibrationProfile::default();

    for (file_id, n_speakers, seed) in [("meeting-a", 2, 1u64), ("meeting-b", 3, 2u64)] {
        let params = ConversationParams {
            file_id: file_id.to_string(),
            n_speakers,
            duration: 300.0,
            turn_on_rate: 0.08,
            turn_off_rate: 0.25,
            overlap_bias: 0.4,
            seed,
        };
        let reference = gen_reference(&params, DEFAULT_FRAME_RATE)?;
        let grid = FrameGrid::for_duration(DEFAULT_FRAME_RATE, params.duration)?;
        let track = gen_posteriors(
            &reference,
            file_id,
            &mapping,
            &profile,
            &grid,
            5.0,
            5.0,
            seed + 100,
        )?;

        let rttm_path = out.join("rttm").join(format!("{file_id}.rttm"));
        let mut bytes = Vec::new();
        write_rttm(&reference, &mut bytes)?;
        std::fs::write(&rttm_path, bytes)?;

        let pst_path = out.join("posteriors").join(format!("{file_id}.pst1"));
        let mut bytes = Vec::new();
        write_posteriors(&track, &mut bytes)?;
        std::fs::write(&pst_path, bytes)?;

        println!(
            "{file_id}: {} segments, {} frames -> {}",
            reference.len(),
            track.num_frames(),
            pst_path.display()
        );
    }
    println!("dataset written under {}", out.display());
    Ok(())
}

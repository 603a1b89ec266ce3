//! Sweeps the alarm threshold over the profiles of the first bundled
//! interval and prints, per channel, how many positions alarm, how many
//! attacks are caught and how many false-positive events remain.
//!
//! cargo run --release --example threshold_sweep

use mpscan::{default_exclusion, generate, mp_hamming_fast, sweep_thresholds, SynthSpec};

fn main() -> mpscan::Result<()> {
    let spec = SynthSpec::from_toml(include_str!("../specs/interval1.spec"))?;
    let log = generate(&spec)?;
    let truth = spec.ground_truth();
    let m = spec.window.unwrap_or(2000);
    let thresholds: Vec<f64> = (0..=12).map(|k| k as f64 * 0.025).collect();

    for channel in log.channels() {
        let profile = mp_hamming_fast(channel, m, default_exclusion(m))?;
        println!("{}", channel.name());
        println!("  threshold  alarmed  detected  false positives");
        for row in sweep_thresholds(&profile, &truth, &thresholds, 0, 1, m)? {
            println!(
                "  {:>9.3}  {:>7}  {:>8}  {:>15}",
                row.threshold, row.alarmed, row.detected, row.false_positives
            );
        }
    }
    Ok(())
}

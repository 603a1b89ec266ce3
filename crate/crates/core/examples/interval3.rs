//! Third bundled interval: a masked pump attack. While P-101 is stopped
//! the backup P-102 runs in its place, so the tank level downstream looks
//! normal. Both pumps show the first attack in their Hamming profiles; the
//! level's z-normalized profile only reacts to the second, unmasked one.
//!
//! cargo run --release --example interval3

use mpscan::{
    default_exclusion, generate, match_attacks, mp_hamming_fast, mp_znorm_fast, threshold_detect, ChannelKind,
    SynthSpec,
};

fn main() -> mpscan::Result<()> {
    let spec = SynthSpec::from_toml(include_str!("../specs/interval3.spec"))?;
    let log = generate(&spec)?;
    let truth = spec.ground_truth();
    let m = spec.window.unwrap_or(500);
    let exclusion = default_exclusion(m);

    for attack in &truth {
        println!(
            "attack {}..={} on {} ({}, affects process: {})",
            attack.start,
            attack.end,
            attack.targets.join("+"),
            attack.category,
            attack.affects_process
        );
    }

    for channel in log.channels() {
        let profile = match channel.kind() {
            ChannelKind::Discrete => mp_hamming_fast(channel, m, exclusion)?,
            ChannelKind::Continuous => mp_znorm_fast(channel, m, exclusion)?,
        };
        let events = threshold_detect(&profile, 0.1, 0, 1);
        let report = match_attacks(&events, &truth, m, m);
        let verdicts: Vec<&str> = report
            .metrics
            .delays
            .iter()
            .map(|d| if d.is_some() { "detected" } else { "missed" })
            .collect();

        // positions whose windows overlap only the first attack
        let first = &truth[0];
        let second = &truth[1];
        let only_first = first.start.saturating_sub(m - 1)..(second.start + 1).saturating_sub(m).min(first.end + 1);
        let masked_peak = profile.distances()[only_first].iter().cloned().fold(0.0, f64::max);
        println!(
            "{:<8} {:<7} peak over first attack {masked_peak:.3e}, events {}, false positives {}, attacks: {}",
            channel.name(),
            profile.metric(),
            events.len(),
            report.metrics.false_positives,
            verdicts.join(", ")
        );
    }
    Ok(())
}

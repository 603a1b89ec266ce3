//! Second bundled interval: one pump kept running past its cycle, then held
//! off for 10000 samples. With m = 2000 only the edges of the long outage
//! stand out; its middle looks like any other idle stretch. At m = 500 the
//! normal cycle already contains all-off and all-on windows, and the
//! profile says much less.
//!
//! cargo run --release --example interval2

use mpscan::{default_exclusion, generate, match_attacks, mp_hamming_fast, threshold_detect, SynthSpec};

fn main() -> mpscan::Result<()> {
    let spec = SynthSpec::from_toml(include_str!("../specs/interval2.spec"))?;
    let log = generate(&spec)?;
    let truth = spec.ground_truth();
    let pump = log.channel("P-302")?;

    for m in [2000, 500] {
        let profile = mp_hamming_fast(pump, m, default_exclusion(m))?;
        let events = threshold_detect(&profile, 0.1, 0, 1);
        let report = match_attacks(&events, &truth, m, m);
        let nonzero = profile.distances().iter().filter(|&&d| d > 0.0).count();
        println!(
            "m = {m}: {nonzero} of {} positions non-zero, {} event(s), detected {}/{}, false positives {}",
            profile.len(),
            events.len(),
            report.metrics.detected,
            truth.len(),
            report.metrics.false_positives
        );
        for e in &events {
            println!("    positions {}..={} peak {:.4}", e.start, e.end, e.peak);
        }
    }
    Ok(())
}

//! Hamming matrix profiles of a pump on a fixed cycle. Without faults the
//! profile is identically zero; a few flipped states and one extended run
//! show up as the only non-zero stretches.
//!
//! cargo run --release --example hamming_profile

use mpscan::{default_exclusion, mp_brute, mp_hamming_fast, select_metric, Channel, Metric};

fn main() -> mpscan::Result<()> {
    let period = 300;
    let pump: Vec<f64> = (0..9000).map(|t| if t % period < 180 { 1.0 } else { 0.0 }).collect();
    let m = 400;
    let exclusion = default_exclusion(m);

    let clean = Channel::new("P-201", pump.clone())?;
    println!("inferred metric: {}", select_metric(&clean, 5));
    let profile = mp_hamming_fast(&clean, m, exclusion)?;
    println!(
        "clean pump: max distance {}",
        profile.distances().iter().cloned().fold(0.0, f64::max)
    );

    let mut faulty = pump;
    for t in [1000, 1001, 2500] {
        faulty[t] = 1.0 - faulty[t];
    }
    faulty[6180..6260].fill(1.0);
    let faulty = Channel::new("P-201", faulty)?;
    let fast = mp_hamming_fast(&faulty, m, exclusion)?;
    let oracle = mp_brute(&faulty, m, Metric::Hamming, exclusion)?;
    println!("diagonal kernel equals direct evaluation: {}", fast == oracle);

    let mut t = 0;
    let d = fast.distances();
    while t < d.len() {
        if d[t] == 0.0 {
            t += 1;
            continue;
        }
        let start = t;
        while t < d.len() && d[t] > 0.0 {
            t += 1;
        }
        let peak = d[start..t].iter().cloned().fold(0.0, f64::max);
        println!(
            "non-zero positions {start}..{t}: peak {peak:.4} ({} mismatches)",
            (peak * m as f64).round()
        );
    }

    let z = mpscan::mp_znorm_fast(&faulty, m, exclusion)?;
    println!(
        "z-normalized profile of the same pump for comparison: max {:.3}",
        z.distances().iter().cloned().fold(0.0, f64::max)
    );
    Ok(())
}

//! z-normalized matrix profile of a noisy sine with one distorted cycle.
//! The diagonal kernel is checked against direct evaluation and the
//! discord lands on the distorted cycle.
//!
//! cargo run --release --example znorm_profile

use std::time::Instant;

use mpscan::{default_exclusion, mp_brute, mp_znorm_fast, Channel, Metric};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> mpscan::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let period = 120.0;
    let mut values: Vec<f64> = (0..6000)
        .map(|t| (t as f64 * std::f64::consts::TAU / period).sin() + rng.gen_range(-0.05..0.05))
        .collect();
    // flatten the top of one cycle
    for v in &mut values[3030..3070] {
        *v = v.min(0.4);
    }
    let channel = Channel::new("FIT-101", values)?;

    let m = 120;
    let exclusion = default_exclusion(m);
    let started = Instant::now();
    let fast = mp_znorm_fast(&channel, m, exclusion)?;
    let fast_time = started.elapsed();
    let started = Instant::now();
    let oracle = mp_brute(&channel, m, Metric::Znorm, exclusion)?;
    let brute_time = started.elapsed();

    let worst = fast
        .distances()
        .iter()
        .zip(oracle.distances())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let same_neighbors = fast.nn_index() == oracle.nn_index();
    println!(
        "{} positions, diagonal kernel {fast_time:.2?}, direct {brute_time:.2?}",
        fast.len()
    );
    println!("largest disagreement {worst:.2e}, identical neighbors: {same_neighbors}");

    let (discord, peak) = fast.discord().expect("non-empty profile");
    let median = {
        let mut d = fast.distances().to_vec();
        d.sort_by(f64::total_cmp);
        d[d.len() / 2]
    };
    println!("discord at position {discord} (distance {peak:.3}, median {median:.3})");
    Ok(())
}

//! The distance kernels on hand-made windows: both routes to the
//! z-normalized distance, what happens on constant windows, the Hamming
//! distance on valve states, and sliding window statistics.
//!
//! cargo run --example distances

use mpscan::{corr_to_distance, hamming_distance, pearson_corr, rolling_stats, znorm_distance};

fn main() -> mpscan::Result<()> {
    let x = [1.0, 2.0, 3.0, 4.0, 5.0, 4.0];
    let y = [10.0, 20.0, 31.0, 39.0, 50.0, 41.0];
    let direct = znorm_distance(&x, &y)?;
    let corr = pearson_corr(&x, &y)?;
    let via_corr = corr_to_distance(corr, x.len())?;
    println!("z-normalized distance: direct {direct:.9}, via correlation {via_corr:.9} (r = {corr:.6})");

    let reversed: Vec<f64> = x.iter().rev().copied().collect();
    println!("window against its reverse: {:.6}", znorm_distance(&x, &reversed)?);

    // A constant window has no shape; it only matches another constant one.
    let flat = [0.0; 6];
    println!(
        "constant vs constant: {}, constant vs varying: {:.6} (sqrt(m) = {:.6})",
        znorm_distance(&flat, &[3.0; 6])?,
        znorm_distance(&flat, &x)?,
        (x.len() as f64).sqrt()
    );
    match pearson_corr(&flat, &x) {
        Ok(r) => println!("correlation with a constant window: {r}"),
        Err(e) => println!("correlation with a constant window: {e}"),
    }

    let normal = [1u8, 1, 1, 0, 2, 2, 2, 0];
    let forced = [1u8, 1, 2, 2, 2, 2, 2, 2];
    let d = hamming_distance(&normal, &forced)?;
    println!(
        "valve windows differ in {d} of {} samples ({:.3})",
        normal.len(),
        d as f64 / normal.len() as f64
    );

    let level: Vec<f64> = (0..12).map(|t| f64::from(t % 4)).collect();
    let stats = rolling_stats(&level, 4)?;
    println!("rolling means {:?}", stats.means());
    println!("rolling stds  {:?}", stats.stds());
    Ok(())
}

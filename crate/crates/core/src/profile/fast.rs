//! Diagonal-order profile kernels.
//!
//! Pairs `(i, i + k)` on one diagonal `k` share all but two samples with
//! their predecessor, so both the sliding dot product and the mismatch count
//! update in O(1). Diagonals are dealt round-robin to independent partitions;
//! each partition computes its diagonals sequentially from the start, so a
//! candidate's distance does not depend on the partitioning, and partitions
//! are merged with an order-independent minimum over `(distance, index)`.

use rayon::prelude::*;

use super::{mismatches, symbols, validate, MatrixProfile, Metric};
use crate::distance::{corr_distance_unchecked, rolling_stats, window_moments, znorm_distance_with, Channel};
use crate::error::Result;

/// Steps between exact re-evaluations of the sliding dot product.
const RESEED_EVERY: usize = 8192;

/// Pairs with `1 - corr` below this are re-evaluated directly. Near a
/// perfect match the correlation route loses most of its digits, while the
/// direct route returns exactly 0 for repeated windows.
const REFINE_BAND: f64 = 1e-5;

fn partitions(diagonals: usize) -> usize {
    (rayon::current_num_threads() * 4).clamp(1, diagonals.max(1))
}

/// Z-normalized profile from rolling statistics and sliding dot products.
pub fn mp_znorm_fast(channel: &Channel, m: usize, exclusion: usize) -> Result<MatrixProfile> {
    let positions = validate(channel, m, Metric::Znorm, exclusion)?;
    let x = channel.values();

    // Centering leaves every correlation unchanged and keeps the dot
    // products small for series with a large offset.
    let offset = x.iter().sum::<f64>() / x.len() as f64;
    let c: Vec<f64> = x.iter().map(|v| v - offset).collect();
    let stats = rolling_stats(&c, m)?;
    let moments: Vec<Option<(f64, f64)>> = x.windows(m).map(window_moments).collect();
    let mu = stats.means();
    let sigma = stats.stds();
    let mf = m as f64;

    let first = exclusion + 1;
    let diagonals = positions.saturating_sub(first);
    let parts = partitions(diagonals);

    let best = (0..parts)
        .into_par_iter()
        .map(|part| {
            let mut best = vec![(f64::INFINITY, usize::MAX); positions];
            let mut k = first + part;
            while k < positions {
                let mut qt = 0.0;
                for i in 0..positions - k {
                    let j = i + k;
                    if i % RESEED_EVERY == 0 {
                        qt = dot(&c[i..i + m], &c[j..j + m]);
                    } else {
                        qt += c[i + m - 1] * c[j + m - 1] - c[i - 1] * c[j - 1];
                    }
                    let d = match (moments[i], moments[j]) {
                        (None, None) => 0.0,
                        (Some(_), None) | (None, Some(_)) => mf.sqrt(),
                        (Some(_), Some(_)) => {
                            let corr = (qt - mf * mu[i] * mu[j]) / (mf * sigma[i] * sigma[j]);
                            if 1.0 - corr < REFINE_BAND {
                                znorm_distance_with(&x[i..i + m], moments[i], &x[j..j + m], moments[j])
                            } else {
                                corr_distance_unchecked(corr.clamp(-1.0, 1.0), mf)
                            }
                        }
                    };
                    offer(&mut best[i], d, j);
                    offer(&mut best[j], d, i);
                }
                k += parts;
            }
            best
        })
        .reduce(
            || vec![(f64::INFINITY, usize::MAX); positions],
            |mut a, b| {
                for (slot, (d, j)) in a.iter_mut().zip(b) {
                    offer(slot, d, j);
                }
                a
            },
        );

    let (distances, nn_index) = best.into_iter().unzip();
    Ok(MatrixProfile::from_parts(
        m,
        Metric::Znorm,
        exclusion,
        distances,
        nn_index,
    ))
}

#[inline]
fn offer(slot: &mut (f64, usize), d: f64, j: usize) {
    if d < slot.0 || (d == slot.0 && j < slot.1) {
        *slot = (d, j);
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Hamming profile from incrementally maintained mismatch counts.
pub fn mp_hamming_fast(channel: &Channel, m: usize, exclusion: usize) -> Result<MatrixProfile> {
    let positions = validate(channel, m, Metric::Hamming, exclusion)?;
    let s = symbols(channel)?;

    let first = exclusion + 1;
    let diagonals = positions.saturating_sub(first);
    let parts = partitions(diagonals);

    // (count << 32) | neighbor: the integer minimum is the lexicographic one.
    let best = (0..parts)
        .into_par_iter()
        .map(|part| {
            let mut best = vec![u64::MAX; positions];
            let mut k = first + part;
            while k < positions {
                let mut count = mismatches(&s[..m], &s[k..k + m]) as u64;
                for i in 0..positions - k {
                    let j = i + k;
                    if i > 0 {
                        count -= (s[i - 1] != s[j - 1]) as u64;
                        count += (s[i + m - 1] != s[j + m - 1]) as u64;
                    }
                    let hi = count << 32;
                    best[i] = best[i].min(hi | j as u64);
                    best[j] = best[j].min(hi | i as u64);
                }
                k += parts;
            }
            best
        })
        .reduce(
            || vec![u64::MAX; positions],
            |mut a, b| {
                for (slot, key) in a.iter_mut().zip(b) {
                    *slot = (*slot).min(key);
                }
                a
            },
        );

    let mf = m as f64;
    let (distances, nn_index) = best
        .into_iter()
        .map(|key| ((key >> 32) as f64 / mf, (key & 0xffff_ffff) as usize))
        .unzip();
    Ok(MatrixProfile::from_parts(
        m,
        Metric::Hamming,
        exclusion,
        distances,
        nn_index,
    ))
}

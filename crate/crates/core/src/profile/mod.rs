//! Self-join matrix profiles.
//!
//! Every entry holds, for one window position, the distance to its nearest
//! neighbor outside the exclusion radius and that neighbor's position. Ties
//! are broken toward the lowest neighbor position.
//!
//! [`mp_brute`] evaluates every admissible pair directly and serves as the
//! oracle. [`mp_znorm_fast`] and [`mp_hamming_fast`] walk the diagonals of
//! the distance matrix with O(1) incremental updates and must agree with it.

mod fast;
mod io;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use self::fast::{mp_hamming_fast, mp_znorm_fast};
pub use self::io::{meta_path, read_profile, write_profile, ProfileMeta};

use crate::distance::{infer_kind, window_moments, Channel, ChannelKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Znorm,
    Hamming,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Znorm => "znorm",
            Metric::Hamming => "hamming",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "znorm" => Ok(Metric::Znorm),
            "hamming" => Ok(Metric::Hamming),
            other => Err(Error::Usage(format!("unknown metric `{other}`"))),
        }
    }
}

/// Hamming when every value is an exact integer and at most `alphabet_cap`
/// distinct values occur, z-normalized otherwise.
pub fn select_metric(channel: &Channel, alphabet_cap: usize) -> Metric {
    match infer_kind(channel.values(), alphabet_cap) {
        ChannelKind::Discrete => Metric::Hamming,
        ChannelKind::Continuous => Metric::Znorm,
    }
}

/// Default trivial-match radius: half the window, rounded up.
pub fn default_exclusion(m: usize) -> usize {
    m.div_ceil(2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixProfile {
    window: usize,
    metric: Metric,
    exclusion: usize,
    distances: Vec<f64>,
    nn_index: Vec<usize>,
}

impl MatrixProfile {
    pub(crate) fn from_parts(
        window: usize,
        metric: Metric,
        exclusion: usize,
        distances: Vec<f64>,
        nn_index: Vec<usize>,
    ) -> Self {
        debug_assert_eq!(distances.len(), nn_index.len());
        MatrixProfile {
            window,
            metric,
            exclusion,
            distances,
            nn_index,
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn exclusion(&self) -> usize {
        self.exclusion
    }

    /// Hamming profiles are stored as mismatch fraction in `[0, 1]`.
    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn nn_index(&self) -> &[usize] {
        &self.nn_index
    }

    /// Number of window positions, `n - m + 1`.
    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    /// Length of the series the profile was computed from.
    pub fn series_len(&self) -> usize {
        self.len() + self.window - 1
    }

    /// Position and value of the largest distance; the lowest position wins ties.
    pub fn discord(&self) -> Option<(usize, f64)> {
        self.distances
            .iter()
            .copied()
            .enumerate()
            .fold(None, |best, (i, d)| match best {
                Some((_, bd)) if bd >= d => best,
                _ => Some((i, d)),
            })
    }
}

/// Checks the shared preconditions and returns the number of window positions.
pub(crate) fn validate(channel: &Channel, m: usize, metric: Metric, exclusion: usize) -> Result<usize> {
    let n = channel.len();
    if m == 0 || m > n {
        return Err(Error::InvalidWindow { window: m, len: n });
    }
    if metric == Metric::Hamming && channel.kind() != ChannelKind::Discrete {
        return Err(Error::MetricMismatch {
            channel: channel.name().to_string(),
        });
    }
    let positions = n - m + 1;
    if positions < 2 * exclusion + 2 {
        return Err(Error::InsufficientLength { positions, exclusion });
    }
    Ok(positions)
}

/// Maps a discrete channel onto compact symbol codes.
pub(crate) fn symbols(channel: &Channel) -> Result<Vec<u8>> {
    let mut alphabet: Vec<i64> = Vec::new();
    let mut out = Vec::with_capacity(channel.len());
    for &v in channel.values() {
        let key = v as i64;
        let code = match alphabet.iter().position(|&a| a == key) {
            Some(c) => c,
            None => {
                if alphabet.len() == u8::MAX as usize + 1 {
                    return Err(Error::InvalidData(format!(
                        "channel `{}` has more than 256 distinct symbols",
                        channel.name()
                    )));
                }
                alphabet.push(key);
                alphabet.len() - 1
            }
        };
        out.push(code as u8);
    }
    Ok(out)
}

/// All-pairs profile by direct evaluation of every admissible pair.
pub fn mp_brute(channel: &Channel, m: usize, metric: Metric, exclusion: usize) -> Result<MatrixProfile> {
    let positions = validate(channel, m, metric, exclusion)?;
    let rows: Vec<(f64, usize)> = match metric {
        Metric::Znorm => {
            let x = channel.values();
            // Each window normalized once; `None` marks a constant window.
            let normalized: Vec<Option<Vec<f64>>> = (0..positions)
                .into_par_iter()
                .map(|i| {
                    let w = &x[i..i + m];
                    window_moments(w).map(|(mu, sd)| w.iter().map(|v| (v - mu) / sd).collect())
                })
                .collect();
            let root_m = (m as f64).sqrt();
            (0..positions)
                .into_par_iter()
                .map(|i| {
                    let mut best = (f64::INFINITY, usize::MAX);
                    for j in admissible(i, positions, exclusion) {
                        let d = match (&normalized[i], &normalized[j]) {
                            (None, None) => 0.0,
                            (Some(a), Some(b)) => euclidean(a, b),
                            _ => root_m,
                        };
                        if d < best.0 {
                            best = (d, j);
                        }
                    }
                    best
                })
                .collect()
        }
        Metric::Hamming => {
            let s = symbols(channel)?;
            let mf = m as f64;
            (0..positions)
                .into_par_iter()
                .map(|i| {
                    let wi = &s[i..i + m];
                    let mut best = (usize::MAX, usize::MAX);
                    for j in admissible(i, positions, exclusion) {
                        let d = mismatches(wi, &s[j..j + m]);
                        if d < best.0 {
                            best = (d, j);
                        }
                    }
                    (best.0 as f64 / mf, best.1)
                })
                .collect()
        }
    };
    let (distances, nn_index) = rows.into_iter().unzip();
    Ok(MatrixProfile::from_parts(m, metric, exclusion, distances, nn_index))
}

/// Neighbor positions of `i` outside the exclusion radius, ascending.
fn admissible(i: usize, positions: usize, exclusion: usize) -> impl Iterator<Item = usize> {
    let below = i.saturating_sub(exclusion);
    (0..below).chain((i + exclusion + 1).min(positions)..positions)
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
}

#[inline]
fn mismatches(a: &[u8], b: &[u8]) -> usize {
    // Chunked so the byte comparisons vectorize without overflowing a u8 lane.
    a.chunks(255)
        .zip(b.chunks(255))
        .map(|(ca, cb)| {
            ca.iter()
                .zip(cb)
                .fold(0u8, |acc, (x, y)| acc.wrapping_add((x != y) as u8)) as usize
        })
        .sum()
}

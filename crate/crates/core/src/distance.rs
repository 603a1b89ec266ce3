//! Distance kernels and sliding-window statistics.
//!
//! Two metrics are provided: the z-normalized Euclidean distance for
//! continuous sensor channels, and the Hamming distance for discrete
//! actuator channels (binary pumps, tertiary valves). The z-normalized
//! distance is available through two algebraically equivalent routes:
//! directly, by normalizing both windows and taking the Euclidean norm of
//! the difference, and through the Pearson correlation of the raw windows.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of distinct integer values a channel may hold and still
/// be treated as discrete by default.
pub const DEFAULT_ALPHABET_CAP: usize = 5;

/// Slack allowed on a correlation outside `[-1, 1]` before it is treated
/// as a contract violation rather than roundoff.
const CORR_CLAMP_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Continuous,
    Discrete,
}

/// One named, uniformly sampled time series.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    name: String,
    values: Vec<f64>,
    kind: ChannelKind,
}

impl Channel {
    /// Builds a channel, inferring its kind with [`DEFAULT_ALPHABET_CAP`].
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        check_values(&name, &values)?;
        let kind = infer_kind(&values, DEFAULT_ALPHABET_CAP);
        Ok(Channel { name, values, kind })
    }

    /// Builds a channel with an explicit kind. A discrete channel must hold
    /// only exact integers.
    pub fn with_kind(name: impl Into<String>, values: Vec<f64>, kind: ChannelKind) -> Result<Self> {
        let name = name.into();
        check_values(&name, &values)?;
        if kind == ChannelKind::Discrete {
            if let Some(v) = values.iter().find(|v| v.fract() != 0.0) {
                return Err(Error::InvalidData(format!(
                    "channel `{name}` is declared discrete but holds non-integer value {v}"
                )));
            }
        }
        Ok(Channel { name, values, kind })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_values(name: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidData(format!("channel `{name}` has no samples")));
    }
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidData(format!(
            "channel `{name}` has a non-finite value at sample {pos}"
        )));
    }
    Ok(())
}

/// Discrete iff every value is an exact integer and there are at most
/// `alphabet_cap` distinct values.
pub(crate) fn infer_kind(values: &[f64], alphabet_cap: usize) -> ChannelKind {
    let mut distinct = BTreeSet::new();
    for &v in values {
        if !v.is_finite() || v.fract() != 0.0 {
            return ChannelKind::Continuous;
        }
        // -0.0 and 0.0 are the same symbol.
        distinct.insert((v + 0.0).to_bits());
        if distinct.len() > alphabet_cap {
            return ChannelKind::Continuous;
        }
    }
    ChannelKind::Discrete
}

/// Per-window means and population standard deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct RollingStats {
    window: usize,
    means: Vec<f64>,
    stds: Vec<f64>,
}

impl RollingStats {
    pub fn window(&self) -> usize {
        self.window
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn stds(&self) -> &[f64] {
        &self.stds
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }
}

/// Mean and standard deviation of every length-`m` window of `values`.
///
/// Windows whose values are all identical get exactly the shared value as
/// mean and exactly `0.0` as deviation; every other window gets a strictly
/// positive deviation. The running update is re-anchored with an exact
/// two-pass evaluation every `m` windows so error cannot accumulate along
/// long series.
pub fn rolling_stats(values: &[f64], m: usize) -> Result<RollingStats> {
    let n = values.len();
    if m == 0 || m > n {
        return Err(Error::InvalidWindow { window: m, len: n });
    }
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidData(format!("non-finite value at sample {pos}")));
    }

    let count = n - m + 1;
    let constant = constant_windows(values, m);
    let mf = m as f64;
    let mut means = Vec::with_capacity(count);
    let mut stds = Vec::with_capacity(count);

    let mut mean = 0.0;
    let mut m2 = 0.0;
    for i in 0..count {
        if i % m == 0 {
            (mean, m2) = two_pass(&values[i..i + m]);
        } else {
            let out = values[i - 1];
            let inc = values[i + m - 1];
            let new_mean = mean + (inc - out) / mf;
            m2 += (inc - out) * (inc - new_mean + out - mean);
            mean = new_mean;
        }

        if constant[i] {
            means.push(values[i]);
            stds.push(0.0);
            continue;
        }
        let var = (m2 / mf).max(0.0);
        if var > 0.0 {
            means.push(mean);
            stds.push(var.sqrt());
        } else {
            // Roundoff wiped out a tiny but real spread.
            let (mu, exact_m2) = two_pass(&values[i..i + m]);
            means.push(mu);
            stds.push((exact_m2 / mf).max(f64::MIN_POSITIVE).sqrt());
        }
    }

    Ok(RollingStats { window: m, means, stds })
}

/// `constant[i]` is true iff `values[i..i + m]` holds a single value.
pub(crate) fn constant_windows(values: &[f64], m: usize) -> Vec<bool> {
    let mut run = 0usize;
    let mut out = Vec::with_capacity(values.len() + 1 - m);
    for t in 0..values.len() {
        run = if t > 0 && values[t] == values[t - 1] {
            run + 1
        } else {
            1
        };
        if t + 1 >= m {
            out.push(run >= m);
        }
    }
    out
}

/// Mean and sum of squared deviations by direct summation.
fn two_pass(window: &[f64]) -> (f64, f64) {
    let mf = window.len() as f64;
    let mean = window.iter().sum::<f64>() / mf;
    let m2 = window.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, m2)
}

/// Exact mean and population deviation of a single window, `None` when the
/// window is constant.
pub(crate) fn window_moments(window: &[f64]) -> Option<(f64, f64)> {
    let first = window[0];
    if window.iter().all(|&v| v == first) {
        return None;
    }
    let (mean, m2) = two_pass(window);
    let std = (m2 / window.len() as f64).sqrt();
    Some((mean, std.max(f64::MIN_POSITIVE)))
}

/// Pearson correlation of two equal-length windows, clamped to `[-1, 1]`.
pub fn pearson_corr(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    if x.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "correlation needs windows of length >= 2, got {}",
            x.len()
        )));
    }
    let (mx, sx) = window_moments(x).ok_or(Error::DegenerateWindow)?;
    let (my, sy) = window_moments(y).ok_or(Error::DegenerateWindow)?;
    let m = x.len() as f64;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok((cov / (m * sx * sy)).clamp(-1.0, 1.0))
}

/// Euclidean distance between z-normalized windows of length `m` with the
/// given correlation: `sqrt(2m(1 - corr))`.
pub fn corr_to_distance(corr: f64, m: usize) -> Result<f64> {
    if !(-1.0 - CORR_CLAMP_SLACK..=1.0 + CORR_CLAMP_SLACK).contains(&corr) {
        return Err(Error::ContractViolation(format!(
            "correlation {corr} lies outside [-1, 1]"
        )));
    }
    Ok(corr_distance_unchecked(corr.clamp(-1.0, 1.0), m as f64))
}

#[inline]
pub(crate) fn corr_distance_unchecked(corr: f64, m: f64) -> f64 {
    (2.0 * m * (1.0 - corr)).max(0.0).sqrt()
}

/// Z-normalized Euclidean distance, computed by normalizing both windows.
///
/// A constant window normalizes to the zero vector: two constant windows are
/// at distance 0, a constant and a non-constant window at `sqrt(m)`.
pub fn znorm_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    Ok(znorm_distance_with(x, window_moments(x), y, window_moments(y)))
}

/// Direct z-normalized distance given each window's precomputed moments.
pub(crate) fn znorm_distance_with(
    x: &[f64],
    x_moments: Option<(f64, f64)>,
    y: &[f64],
    y_moments: Option<(f64, f64)>,
) -> f64 {
    match (x_moments, y_moments) {
        (None, None) => 0.0,
        (Some(_), None) | (None, Some(_)) => (x.len() as f64).sqrt(),
        (Some((mx, sx)), Some((my, sy))) => x
            .iter()
            .zip(y)
            .map(|(a, b)| {
                let d = (a - mx) / sx - (b - my) / sy;
                d * d
            })
            .sum::<f64>()
            .sqrt(),
    }
}

/// Number of positions at which the two windows hold different symbols.
pub fn hamming_distance<T: PartialEq>(x: &[T], y: &[T]) -> Result<usize> {
    check_pair(x, y)?;
    Ok(x.iter().zip(y).filter(|(a, b)| a != b).count())
}

fn check_pair<T>(x: &[T], y: &[T]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "window lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.is_empty() {
        return Err(Error::InvalidInput("windows must not be empty".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn rolling_stats_small_examples() {
        let s = rolling_stats(&[1.0, 2.0, 3.0, 4.0], 2).unwrap();
        assert_eq!(s.means(), &[1.5, 2.5, 3.5]);
        assert_eq!(s.stds(), &[0.5, 0.5, 0.5]);

        let s = rolling_stats(&[5.0, 5.0, 5.0], 3).unwrap();
        assert_eq!(s.means(), &[5.0]);
        assert_eq!(s.stds(), &[0.0]);

        let s = rolling_stats(&[7.0], 1).unwrap();
        assert_eq!(s.means(), &[7.0]);
        assert_eq!(s.stds(), &[0.0]);
    }

    #[test]
    fn rolling_stats_errors() {
        assert!(matches!(
            rolling_stats(&[1.0, 2.0], 3),
            Err(Error::InvalidWindow { window: 3, len: 2 })
        ));
        assert!(matches!(
            rolling_stats(&[1.0, 2.0], 0),
            Err(Error::InvalidWindow { .. })
        ));
        assert!(matches!(
            rolling_stats(&[1.0, f64::NAN, 2.0], 2),
            Err(Error::InvalidData(_))
        ));
    }

    #[test]
    fn rolling_stats_constant_runs_are_exact() {
        let v = [0.1, 0.1, 0.1, 0.1, 0.3, 0.3, 0.3];
        let s = rolling_stats(&v, 3).unwrap();
        assert_eq!(s.stds()[0], 0.0);
        assert_eq!(s.stds()[1], 0.0);
        assert_eq!(s.means()[0], 0.1);
        assert!(s.stds()[2] > 0.0);
        assert!(s.stds()[3] > 0.0);
        assert_eq!(s.stds()[4], 0.0);
        assert_eq!(s.means()[4], 0.3);
    }

    #[test]
    fn rolling_stats_large_offset_stays_accurate() {
        let v: Vec<f64> = (0..5000).map(|i| 1e8 + ((i * 37) % 11) as f64).collect();
        let s = rolling_stats(&v, 64).unwrap();
        for (i, (&mu, &sd)) in s.means().iter().zip(s.stds()).enumerate() {
            let (m2mu, m2) = two_pass(&v[i..i + 64]);
            assert!(close(mu, m2mu, 1e-9 * m2mu.abs()));
            assert!(close(sd, (m2 / 64.0).sqrt(), 1e-6));
        }
    }

    #[test]
    fn pearson_examples() {
        assert!(close(
            pearson_corr(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(),
            1.0,
            1e-12
        ));
        assert!(close(
            pearson_corr(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(),
            -1.0,
            1e-12
        ));
        // 6.5 / sqrt(43.75) by direct summation
        let c = pearson_corr(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 5.0]).unwrap();
        assert!(close(c, 0.982_707_629_823_990_8, 1e-12));
    }

    #[test]
    fn pearson_refuses_constant_windows() {
        assert!(matches!(
            pearson_corr(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(Error::DegenerateWindow)
        ));
        assert!(matches!(pearson_corr(&[1.0], &[2.0]), Err(Error::InvalidInput(_))));
        assert!(matches!(pearson_corr(&[1.0, 2.0], &[2.0]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn corr_to_distance_examples() {
        assert_eq!(corr_to_distance(1.0, 2000).unwrap(), 0.0);
        assert_eq!(corr_to_distance(-1.0, 4).unwrap(), 4.0);
        assert_eq!(corr_to_distance(0.0, 2).unwrap(), 2.0);
        // roundoff just past the bound is absorbed
        assert_eq!(corr_to_distance(1.0 + 1e-12, 8).unwrap(), 0.0);
        assert!(matches!(corr_to_distance(1.5, 8), Err(Error::ContractViolation(_))));
        assert!(matches!(
            corr_to_distance(f64::NAN, 8),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn znorm_examples() {
        let x = [0.3, -1.2, 4.0, 2.2];
        assert!(close(znorm_distance(&x, &x).unwrap(), 0.0, 1e-12));
        assert!(close(
            znorm_distance(&[0.0, 1.0, 2.0], &[10.0, 12.0, 14.0]).unwrap(),
            0.0,
            1e-12
        ));
        assert!(close(
            znorm_distance(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(),
            3.464_101_615_137_754_4,
            1e-12
        ));
    }

    #[test]
    fn znorm_constant_window_policy() {
        assert_eq!(znorm_distance(&[5.0; 4], &[0.0; 4]).unwrap(), 0.0);
        assert_eq!(znorm_distance(&[5.0; 4], &[1.0, 2.0, 3.0, 4.0]).unwrap(), 2.0);
        assert_eq!(znorm_distance(&[1.0, 2.0, 3.0, 4.0], &[0.1; 4]).unwrap(), 2.0);
        assert!(matches!(
            znorm_distance(&[1.0], &[1.0, 2.0]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_distance(&[0, 1, 1, 0], &[0, 1, 1, 0]).unwrap(), 0);
        assert_eq!(hamming_distance(&[0, 1, 1], &[1, 1, 0]).unwrap(), 2);
        assert_eq!(hamming_distance(&[0, 2, 1], &[0, 1, 1]).unwrap(), 1);
        assert!(matches!(hamming_distance(&[0, 1], &[0]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn channel_kind_inference() {
        let c = Channel::new("P-101", vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(c.kind(), ChannelKind::Discrete);
        let c = Channel::new("MV-101", vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(c.kind(), ChannelKind::Discrete);
        let c = Channel::new("LIT-101", vec![500.5, 501.25, 499.0]).unwrap();
        assert_eq!(c.kind(), ChannelKind::Continuous);
        let c = Channel::new("wide", (0..10).map(f64::from).collect()).unwrap();
        assert_eq!(c.kind(), ChannelKind::Continuous);
        assert!(Channel::new("x", vec![]).is_err());
        assert!(Channel::new("x", vec![1.0, f64::INFINITY]).is_err());
        assert!(Channel::with_kind("x", vec![0.5], ChannelKind::Discrete).is_err());
    }
}

//! Matrix profiles for anomaly detection in industrial process data.
//!
//! Continuous sensor channels are profiled with the z-normalized Euclidean
//! distance. Binary and tertiary actuator channels, where z-normalization
//! breaks down on constant windows, are profiled with the Hamming distance,
//! normalized to the fraction of mismatched samples. Windows whose nearest
//! neighbor is far away are discords; thresholding the profile turns them
//! into anomaly events that can be scored against labeled attacks.
//!
//! ```
//! use mpscan::{mp_hamming_fast, threshold_detect, Channel};
//!
//! let mut pump: Vec<f64> = (0..400).map(|t| if t % 40 < 20 { 1.0 } else { 0.0 }).collect();
//! pump[200..230].fill(1.0);
//! let channel = Channel::new("P-101", pump).unwrap();
//! let profile = mp_hamming_fast(&channel, 40, 20).unwrap();
//! let events = threshold_detect(&profile, 0.1, 0, 1);
//! assert_eq!(events.len(), 1);
//! ```

pub mod cli;
pub mod dataio;
pub mod detect;
pub mod distance;
mod error;
mod fsutil;
pub mod plot;
pub mod profile;

pub use dataio::{concat, generate, read_csv, slice_interval, write_csv, CsvOptions, ProcessLog, SynthSpec};
pub use detect::{
    match_attacks, sweep_thresholds, threshold_detect, AnomalyEvent, AttackCategory, AttackInterval, DetectionReport,
};
pub use distance::{
    corr_to_distance, hamming_distance, pearson_corr, rolling_stats, znorm_distance, Channel, ChannelKind, RollingStats,
};
pub use error::{Error, Result};
pub use profile::{default_exclusion, mp_brute, mp_hamming_fast, mp_znorm_fast, select_metric, MatrixProfile, Metric};

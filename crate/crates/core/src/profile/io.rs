//! Profile persistence: a `position,distance,nn_index` CSV plus a
//! `key=value` sidecar carrying the parameters needed to interpret it.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{MatrixProfile, Metric};
use crate::error::{Error, Result};
use crate::fsutil::{csv_error, fmt_sig, read_to_string, write_atomic};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileMeta {
    pub window: usize,
    pub metric: Metric,
    pub exclusion: usize,
    pub channel: String,
    pub series_len: usize,
}

impl ProfileMeta {
    pub fn of(profile: &MatrixProfile, channel: &str) -> Self {
        ProfileMeta {
            window: profile.window(),
            metric: profile.metric(),
            exclusion: profile.exclusion(),
            channel: channel.to_string(),
            series_len: profile.series_len(),
        }
    }

    fn render(&self) -> String {
        format!(
            "window={}\nmetric={}\nexclusion={}\nchannel={}\nseries_len={}\n",
            self.window, self.metric, self.exclusion, self.channel, self.series_len
        )
    }

    fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut window = None;
        let mut metric = None;
        let mut exclusion = None;
        let mut channel = None;
        let mut series_len = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |message: String| Error::Parse {
                line: lineno as u64 + 1,
                column: path.display().to_string(),
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got `{line}`")))?;
            let value = value.trim();
            let int = |v: &str| v.parse::<usize>().map_err(|e| bad(format!("{key}: {e}")));
            match key.trim() {
                "window" => window = Some(int(value)?),
                "metric" => metric = Some(value.parse().map_err(|e: Error| bad(e.to_string()))?),
                "exclusion" => exclusion = Some(int(value)?),
                "channel" => channel = Some(value.to_string()),
                "series_len" => series_len = Some(int(value)?),
                _ => {}
            }
        }
        let missing = |k: &str| Error::Schema(format!("{}: missing `{k}`", path.display()));
        Ok(ProfileMeta {
            window: window.ok_or_else(|| missing("window"))?,
            metric: metric.ok_or_else(|| missing("metric"))?,
            exclusion: exclusion.ok_or_else(|| missing("exclusion"))?,
            channel: channel.ok_or_else(|| missing("channel"))?,
            series_len: series_len.ok_or_else(|| missing("series_len"))?,
        })
    }
}

/// Sidecar path: the profile path with its extension replaced by `meta`.
pub fn meta_path(path: &Path) -> PathBuf {
    path.with_extension("meta")
}

pub fn write_profile(path: &Path, profile: &MatrixProfile, channel: &str) -> Result<()> {
    let mut csv = String::with_capacity(profile.len() * 24 + 32);
    csv.push_str("position,distance,nn_index\n");
    for (i, (&d, &j)) in profile.distances().iter().zip(profile.nn_index()).enumerate() {
        let _ = writeln!(csv, "{i},{},{j}", fmt_sig(d, 9));
    }
    write_atomic(path, csv.as_bytes())?;
    write_atomic(&meta_path(path), ProfileMeta::of(profile, channel).render().as_bytes())
}

pub fn read_profile(path: &Path) -> Result<(MatrixProfile, ProfileMeta)> {
    let meta_file = meta_path(path);
    let meta = ProfileMeta::parse(&read_to_string(&meta_file)?, &meta_file)?;

    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if header != ["position", "distance", "nn_index"] {
        return Err(Error::Schema(format!(
            "{}: expected header position,distance,nn_index",
            path.display()
        )));
    }

    let mut distances = Vec::new();
    let mut nn_index = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |k: usize, name: &str| -> Result<&str> {
            record.get(k).map(str::trim).ok_or_else(|| Error::Parse {
                line,
                column: name.into(),
                message: "missing field".into(),
            })
        };
        let position: usize = parse_field(field(0, "position")?, line, "position")?;
        if position != distances.len() {
            return Err(Error::Parse {
                line,
                column: "position".into(),
                message: format!("expected position {}, got {position}", distances.len()),
            });
        }
        let d: f64 = parse_field(field(1, "distance")?, line, "distance")?;
        if !d.is_finite() || d < 0.0 {
            return Err(Error::Parse {
                line,
                column: "distance".into(),
                message: format!("distance {d} is not a finite nonnegative number"),
            });
        }
        distances.push(d);
        nn_index.push(parse_field(field(2, "nn_index")?, line, "nn_index")?);
    }

    if distances.len() + meta.window != meta.series_len + 1 {
        return Err(Error::Schema(format!(
            "{}: {} rows do not match window {} over {} samples",
            path.display(),
            distances.len(),
            meta.window,
            meta.series_len
        )));
    }
    let profile = MatrixProfile::from_parts(meta.window, meta.metric, meta.exclusion, distances, nn_index);
    Ok((profile, meta))
}

fn parse_field<T: std::str::FromStr>(raw: &str, line: u64, column: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.parse().map_err(|e: T::Err| Error::Parse {
        line,
        column: column.into(),
        message: format!("`{raw}`: {e}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::Channel;
    use crate::profile::mp_hamming_fast;

    #[test]
    fn round_trip_with_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let x: Vec<f64> = (0..60).map(|i| ((i * 7) % 5 % 2) as f64).collect();
        let c = Channel::new("P-101", x).unwrap();
        let p = mp_hamming_fast(&c, 8, 4).unwrap();
        let path = dir.path().join("P-101.profile.csv");
        write_profile(&path, &p, "P-101").unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("position,distance,nn_index\n0,"));
        let meta = std::fs::read_to_string(dir.path().join("P-101.profile.meta")).unwrap();
        assert!(meta.contains("metric=hamming"));

        let (back, meta) = read_profile(&path).unwrap();
        assert_eq!(meta.channel, "P-101");
        assert_eq!(meta.series_len, 60);
        assert_eq!(back.nn_index(), p.nn_index());
        for (a, b) in back.distances().iter().zip(p.distances()) {
            assert!((a - b).abs() <= 1e-8 * b.max(1.0));
        }
    }

    #[test]
    fn rejects_wrong_row_count() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        std::fs::write(&path, "position,distance,nn_index\n0,0.5,3\n").unwrap();
        std::fs::write(
            dir.path().join("x.meta"),
            "window=4\nmetric=znorm\nexclusion=2\nchannel=x\nseries_len=20\n",
        )
        .unwrap();
        assert!(matches!(read_profile(&path), Err(Error::Schema(_))));
    }
}

//! Process logs: CSV ingestion and export, interval slicing, and the
//! synthetic process generator.
//!
//! A log is a set of equally long channels sampled at 1 Hz, with optional
//! per-sample attack labels. Attack metadata (targets, category) lives in a
//! separate ground-truth file, see [`read_ground_truth`].

mod synth;
mod truth;

use std::fmt::Write as _;
use std::path::Path;

use chrono::{DateTime, NaiveDateTime};

pub use self::synth::{generate, AttackAction, AttackSpec, ChannelSpec, SignalSpec, SynthSpec};
pub use self::truth::{ground_truth_csv, read_ground_truth, write_ground_truth};

use crate::distance::{infer_kind, Channel, ChannelKind, DEFAULT_ALPHABET_CAP};
use crate::error::{Error, Result};
use crate::fsutil::{csv_error, write_atomic};

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessLog {
    start_time: i64,
    len: usize,
    channels: Vec<Channel>,
    labels: Option<Vec<bool>>,
}

impl ProcessLog {
    /// Assembles a log starting at timestamp 0. All channels and labels
    /// must share one length.
    pub fn new(channels: Vec<Channel>, labels: Option<Vec<bool>>) -> Result<Self> {
        Self::with_start(0, channels, labels)
    }

    fn with_start(start_time: i64, channels: Vec<Channel>, labels: Option<Vec<bool>>) -> Result<Self> {
        let len = channels
            .first()
            .map(Channel::len)
            .or(labels.as_ref().map(Vec::len))
            .unwrap_or(0);
        if let Some(c) = channels.iter().find(|c| c.len() != len) {
            return Err(Error::Schema(format!(
                "channel `{}` has {} samples, expected {len}",
                c.name(),
                c.len()
            )));
        }
        if let Some(l) = &labels {
            if l.len() != len {
                return Err(Error::Schema(format!("{} labels for {len} samples", l.len())));
            }
        }
        for (i, c) in channels.iter().enumerate() {
            if channels[..i].iter().any(|o| o.name() == c.name()) {
                return Err(Error::Schema(format!("duplicate channel `{}`", c.name())));
            }
        }
        Ok(ProcessLog {
            start_time,
            len,
            channels,
            labels,
        })
    }

    /// A log with no samples and no channels.
    pub fn empty() -> Self {
        ProcessLog {
            start_time: 0,
            len: 0,
            channels: Vec::new(),
            labels: Some(Vec::new()),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn start_time(&self) -> i64 {
        self.start_time
    }

    /// Timestamps in seconds, one per sample.
    pub fn timestamps(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.len as i64).map(move |i| self.start_time + i)
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn channel_names(&self) -> impl Iterator<Item = &str> {
        self.channels.iter().map(Channel::name)
    }

    pub fn channel(&self, name: &str) -> Result<&Channel> {
        self.channels
            .iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::InvalidInput(format!("no channel named `{name}`")))
    }

    pub fn labels(&self) -> Option<&[bool]> {
        self.labels.as_deref()
    }
}

#[derive(Debug, Clone)]
pub struct CsvOptions {
    /// Timestamp column, matched case-insensitively.
    pub timestamp_column: String,
    /// Label column names tried in order, matched case-insensitively.
    pub label_columns: Vec<String>,
    /// Keep only these channels; all numeric columns when `None`.
    pub channels: Option<Vec<String>>,
    pub alphabet_cap: usize,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            timestamp_column: "Timestamp".into(),
            label_columns: vec!["Label".into(), "Normal/Attack".into()],
            channels: None,
            alphabet_cap: DEFAULT_ALPHABET_CAP,
        }
    }
}

/// Parses a label token: `Normal` is false, `Attack` is true.
pub fn parse_label(raw: &str) -> Option<bool> {
    let token: String = raw.split_whitespace().collect();
    match token.to_ascii_lowercase().as_str() {
        "normal" => Some(false),
        "attack" => Some(true),
        _ => None,
    }
}

/// Integer seconds or an ISO-8601 date-time.
fn parse_timestamp(raw: &str) -> Option<i64> {
    let raw = raw.trim();
    if let Ok(secs) = raw.parse::<i64>() {
        return Some(secs);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return Some(dt.timestamp());
    }
    const FORMATS: [&str; 3] = ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%d/%m/%Y %I:%M:%S %p"];
    FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(raw, f).ok())
        .map(|dt| dt.and_utc().timestamp())
}

pub fn read_csv(path: &Path, options: &CsvOptions) -> Result<ProcessLog> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv_from(file, options).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn read_csv_from<R: std::io::Read>(reader: R, options: &CsvOptions) -> Result<ProcessLog> {
    let here = Path::new("<csv>");
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(here, e))?
        .iter()
        .map(str::to_string)
        .collect();

    let find = |name: &str| header.iter().position(|h| h.eq_ignore_ascii_case(name));
    let ts_col = find(&options.timestamp_column)
        .ok_or_else(|| Error::Schema(format!("missing timestamp column `{}`", options.timestamp_column)))?;
    let label_col = options.label_columns.iter().find_map(|l| find(l));
    let data_cols: Vec<usize> = match &options.channels {
        None => (0..header.len())
            .filter(|&i| i != ts_col && Some(i) != label_col)
            .collect(),
        Some(wanted) => wanted
            .iter()
            .map(|w| find(w).ok_or_else(|| Error::Schema(format!("missing channel column `{w}`"))))
            .collect::<Result<_>>()?,
    };

    let mut times: Vec<i64> = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); data_cols.len()];
    let mut labels: Vec<bool> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(here, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let cell = |i: usize| record.get(i).unwrap_or("");
        let bad = |i: usize, message: String| Error::Parse {
            line,
            column: header[i].clone(),
            message,
        };

        let t = parse_timestamp(cell(ts_col))
            .ok_or_else(|| bad(ts_col, format!("`{}` is not a timestamp", cell(ts_col))))?;
        if let Some(&prev) = times.last() {
            if t != prev + 1 {
                return Err(bad(ts_col, format!("timestamp {t} does not follow {prev} at 1 Hz")));
            }
        }
        times.push(t);

        for (slot, &i) in columns.iter_mut().zip(&data_cols) {
            let v: f64 = cell(i)
                .parse()
                .map_err(|_| bad(i, format!("`{}` is not a number", cell(i))))?;
            if !v.is_finite() {
                return Err(bad(i, format!("`{}` is not finite", cell(i))));
            }
            slot.push(v);
        }
        if let Some(i) = label_col {
            labels.push(parse_label(cell(i)).ok_or_else(|| bad(i, format!("unknown label `{}`", cell(i))))?);
        }
    }

    if times.is_empty() {
        return Ok(ProcessLog::empty());
    }
    let channels = data_cols
        .iter()
        .zip(columns)
        .map(|(&i, values)| {
            let kind = infer_kind(&values, options.alphabet_cap);
            Channel::with_kind(header[i].clone(), values, kind)
        })
        .collect::<Result<Vec<_>>>()?;
    ProcessLog::with_start(times[0], channels, label_col.map(|_| labels))
}

/// Renders `log` with a `Timestamp` column, one column per channel and a
/// `Label` column when labels are present.
pub fn csv_string(log: &ProcessLog) -> String {
    let mut out = String::new();
    out.push_str("Timestamp");
    for c in log.channels() {
        out.push(',');
        out.push_str(c.name());
    }
    if log.labels().is_some() {
        out.push_str(",Label");
    }
    out.push('\n');
    for (i, t) in log.timestamps().enumerate() {
        let _ = write!(out, "{t}");
        for c in log.channels() {
            let _ = write!(out, ",{}", c.values()[i]);
        }
        if let Some(labels) = log.labels() {
            out.push_str(if labels[i] { ",Attack" } else { ",Normal" });
        }
        out.push('\n');
    }
    out
}

pub fn write_csv(path: &Path, log: &ProcessLog) -> Result<()> {
    write_atomic(path, csv_string(log).as_bytes())
}

/// Samples `start..=end`, renumbered from timestamp 0.
pub fn slice_interval(log: &ProcessLog, start: usize, end: usize) -> Result<ProcessLog> {
    if start > end || end >= log.len() {
        return Err(Error::InvalidInput(format!(
            "interval {start}..={end} is outside a log of {} samples",
            log.len()
        )));
    }
    let channels = log
        .channels
        .iter()
        .map(|c| Channel::with_kind(c.name(), c.values()[start..=end].to_vec(), c.kind()))
        .collect::<Result<Vec<_>>>()?;
    let labels = log.labels.as_ref().map(|l| l[start..=end].to_vec());
    ProcessLog::new(channels, labels)
}

/// `a` followed by `b`, renumbered from timestamp 0. Both logs must carry
/// the same channel names; a side without labels counts as all normal.
pub fn concat(a: &ProcessLog, b: &ProcessLog) -> Result<ProcessLog> {
    if a.is_empty() && a.channels.is_empty() {
        return renumbered(b);
    }
    if b.is_empty() && b.channels.is_empty() {
        return renumbered(a);
    }
    let mut names_a: Vec<&str> = a.channel_names().collect();
    let mut names_b: Vec<&str> = b.channel_names().collect();
    names_a.sort_unstable();
    names_b.sort_unstable();
    if names_a != names_b {
        return Err(Error::Schema(format!(
            "channel sets differ: [{}] vs [{}]",
            names_a.join(", "),
            names_b.join(", ")
        )));
    }

    let channels = a
        .channels
        .iter()
        .map(|ca| {
            let cb = b.channel(ca.name())?;
            let mut values = ca.values().to_vec();
            values.extend_from_slice(cb.values());
            let kind = if ca.kind() == ChannelKind::Discrete && cb.kind() == ChannelKind::Discrete {
                ChannelKind::Discrete
            } else {
                ChannelKind::Continuous
            };
            Channel::with_kind(ca.name(), values, kind)
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = match (&a.labels, &b.labels) {
        (None, None) => None,
        (la, lb) => {
            let mut out = la.clone().unwrap_or_else(|| vec![false; a.len]);
            out.extend(lb.clone().unwrap_or_else(|| vec![false; b.len]));
            Some(out)
        }
    };
    ProcessLog::new(channels, labels)
}

fn renumbered(log: &ProcessLog) -> Result<ProcessLog> {
    ProcessLog::new(log.channels.clone(), log.labels.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ProcessLog> {
        read_csv_from(text.as_bytes(), &CsvOptions::default())
    }

    #[test]
    fn reads_two_rows() {
        let log = parse("Timestamp,P-101,LIT-101,Label\n0,1,500.5,Normal\n1,0,501.25, Attack \n").unwrap();
        assert_eq!(log.len(), 2);
        assert_eq!(log.labels(), Some(&[false, true][..]));
        assert_eq!(log.channel("P-101").unwrap().kind(), ChannelKind::Discrete);
        assert_eq!(log.channel("LIT-101").unwrap().values(), &[500.5, 501.25]);
    }

    #[test]
    fn iso_timestamps_and_swat_label_header() {
        let log =
            parse(" Timestamp , MV-101 ,Normal/Attack\n2015-12-28T10:00:00,1,NORMAL\n2015-12-28T10:00:01,2,A ttack\n")
                .unwrap();
        assert_eq!(log.len(), 2);
        assert_eq!(log.labels(), Some(&[false, true][..]));
        assert_eq!(log.channel("MV-101").unwrap().values(), &[1.0, 2.0]);
    }

    #[test]
    fn bad_cells_are_reported() {
        match parse("Timestamp,P-101\n0,1\n1,abc\n") {
            Err(Error::Parse { line, column, message }) => {
                assert_eq!(line, 3);
                assert_eq!(column, "P-101");
                assert!(message.contains("abc"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("Timestamp,P-101\n0,1\n1\n"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse("Timestamp,P-101,Label\n0,1,Maybe\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(parse("Timestamp,P-101\n0,1\n2,1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse("Time,P-101\n0,1\n"), Err(Error::Schema(_))));
    }

    #[test]
    fn slicing_and_concatenation() {
        let normal = ProcessLog::new(vec![Channel::new("P-102", vec![0.0; 10000]).unwrap()], None).unwrap();
        let mut attack_values = vec![0.0; 7203];
        attack_values[100..200].fill(1.0);
        let attack_labels: Vec<bool> = attack_values.iter().map(|&v| v == 1.0).collect();
        let attack = ProcessLog::new(vec![Channel::new("P-102", attack_values).unwrap()], Some(attack_labels)).unwrap();
        let joined = concat(&normal, &attack).unwrap();
        assert_eq!(joined.len(), 17203);
        let labels = joined.labels().unwrap();
        assert!(labels[..10000].iter().all(|&l| !l));
        assert!(labels[10100]);
        assert_eq!(joined.timestamps().last(), Some(17202));

        let one = slice_interval(&joined, 0, 0).unwrap();
        assert_eq!(one.len(), 1);
        let mid = slice_interval(&joined, 10100, 10199).unwrap();
        assert!(mid.labels().unwrap().iter().all(|&l| l));
        assert_eq!(mid.start_time(), 0);
        assert!(slice_interval(&joined, 5, 17203).is_err());

        let other = ProcessLog::new(vec![Channel::new("P-101", vec![0.0; 3]).unwrap()], None).unwrap();
        assert!(matches!(concat(&normal, &other), Err(Error::Schema(_))));
    }

    #[test]
    fn csv_round_trip() {
        let log = ProcessLog::new(
            vec![
                Channel::new("MV-101", vec![0.0, 1.0, 2.0, 1.0]).unwrap(),
                Channel::new("LIT-101", vec![0.1, 1.0 / 3.0, -2.5e-7, 1e12]).unwrap(),
            ],
            Some(vec![false, false, true, false]),
        )
        .unwrap();
        let back = parse(&csv_string(&log)).unwrap();
        assert_eq!(back, log);
    }
}

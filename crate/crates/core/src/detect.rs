//! Thresholding a profile into anomaly events and scoring the events
//! against labeled attack intervals.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsutil::{fmt_sig, write_atomic};
use crate::profile::MatrixProfile;

/// A maximal run of alarmed window positions (inclusive bounds).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnomalyEvent {
    pub start: usize,
    pub end: usize,
    pub peak: f64,
    pub width: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AttackCategory {
    /// Single stage, single point.
    #[serde(rename = "SSSP")]
    Sssp,
    /// Single stage, multiple points.
    #[serde(rename = "SSMP")]
    Ssmp,
    /// Multi stage, single point.
    #[serde(rename = "MSSP")]
    Mssp,
    /// Multi stage, multiple points.
    #[serde(rename = "MSMP")]
    Msmp,
}

impl fmt::Display for AttackCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackCategory::Sssp => "SSSP",
            AttackCategory::Ssmp => "SSMP",
            AttackCategory::Mssp => "MSSP",
            AttackCategory::Msmp => "MSMP",
        })
    }
}

impl FromStr for AttackCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "SSSP" => Ok(AttackCategory::Sssp),
            "SSMP" => Ok(AttackCategory::Ssmp),
            "MSSP" => Ok(AttackCategory::Mssp),
            "MSMP" => Ok(AttackCategory::Msmp),
            other => Err(Error::InvalidInput(format!("unknown attack category `{other}`"))),
        }
    }
}

/// One labeled attack, in sample indices (inclusive bounds).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AttackInterval {
    pub start: usize,
    pub end: usize,
    pub targets: Vec<String>,
    pub category: AttackCategory,
    pub affects_process: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Match {
    pub attack: usize,
    pub event: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub detected: usize,
    pub missed: usize,
    pub false_positives: usize,
    /// Samples from attack start to the first alarm, `None` when missed.
    pub delays: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub events: Vec<AnomalyEvent>,
    pub attacks: Vec<AttackInterval>,
    pub matches: Vec<Match>,
    pub metrics: Metrics,
}

/// Zero distances never alarm: an exact repeat elsewhere in the series is
/// the opposite of an anomaly, including at threshold 0.
#[inline]
pub fn is_alarm(distance: f64, threshold: f64) -> bool {
    distance >= threshold && distance > 0.0
}

/// Runs of alarmed positions, merged across gaps of at most `merge_gap`
/// positions, dropping runs narrower than `min_width`.
pub fn threshold_detect(
    profile: &MatrixProfile,
    threshold: f64,
    merge_gap: usize,
    min_width: usize,
) -> Vec<AnomalyEvent> {
    detect_runs(profile.distances(), threshold, merge_gap, min_width)
}

/// [`threshold_detect`] over a bare distance sequence.
pub fn detect_runs(distances: &[f64], threshold: f64, merge_gap: usize, min_width: usize) -> Vec<AnomalyEvent> {
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut open: Option<usize> = None;
    for (i, &d) in distances.iter().enumerate() {
        match (is_alarm(d, threshold), open) {
            (true, None) => open = Some(i),
            (false, Some(s)) => {
                runs.push((s, i - 1));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        runs.push((s, distances.len() - 1));
    }

    let mut merged: Vec<(usize, usize)> = Vec::with_capacity(runs.len());
    for (s, e) in runs {
        match merged.last_mut() {
            Some(last) if s - last.1 - 1 <= merge_gap => last.1 = e,
            _ => merged.push((s, e)),
        }
    }

    merged
        .into_iter()
        .map(|(start, end)| AnomalyEvent {
            start,
            end,
            peak: distances[start..=end].iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            width: end - start + 1,
        })
        .filter(|e| e.width >= min_width)
        .collect()
}

/// Scores events against attacks.
///
/// A window at position `p` covers samples `[p, p + m - 1]`. An attack is
/// detected when some event's covered samples intersect
/// `[attack.start, attack.end + smear]`. Overlapping attacks form one group
/// that is detected or missed as a unit. Events touching no group are false
/// positives. Inputs are sorted internally, so the report does not depend on
/// their order.
pub fn match_attacks(events: &[AnomalyEvent], attacks: &[AttackInterval], m: usize, smear: usize) -> DetectionReport {
    let mut events = events.to_vec();
    events.sort_by_key(|e| (e.start, e.end));
    let mut attacks = attacks.to_vec();
    attacks.sort();

    // (first attack, last attack, group start, group end)
    let mut groups: Vec<(usize, usize, usize, usize)> = Vec::new();
    for (k, a) in attacks.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if a.start <= g.3 => {
                g.1 = k;
                g.3 = g.3.max(a.end);
            }
            _ => groups.push((k, k, a.start, a.end)),
        }
    }

    let span = |e: &AnomalyEvent| (e.start, e.end + m.saturating_sub(1));
    let overlaps = |(s, e): (usize, usize), lo: usize, hi: usize| s <= hi && e >= lo;

    let mut event_matched = vec![false; events.len()];
    let mut matches = Vec::new();
    let mut delays = vec![None; attacks.len()];
    for &(first, last, g_start, g_end) in &groups {
        let hits: Vec<usize> = events
            .iter()
            .enumerate()
            .filter(|(_, e)| overlaps(span(e), g_start, g_end + smear))
            .map(|(i, _)| i)
            .collect();
        let Some(first_alarm) = hits.iter().map(|&i| events[i].start).min() else {
            continue;
        };
        for &i in &hits {
            event_matched[i] = true;
        }
        for k in first..=last {
            let a = &attacks[k];
            delays[k] = Some(first_alarm.saturating_sub(a.start));
            for &i in &hits {
                if overlaps(span(&events[i]), a.start, a.end + smear) {
                    matches.push(Match { attack: k, event: i });
                }
            }
        }
    }

    let detected = delays.iter().filter(|d| d.is_some()).count();
    let metrics = Metrics {
        detected,
        missed: attacks.len() - detected,
        false_positives: event_matched.iter().filter(|&&m| !m).count(),
        delays,
    };
    DetectionReport {
        events,
        attacks,
        matches,
        metrics,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub threshold: f64,
    pub detected: usize,
    pub false_positives: usize,
    /// Number of window positions at or above the threshold.
    pub alarmed: usize,
}

pub fn sweep_thresholds(
    profile: &MatrixProfile,
    attacks: &[AttackInterval],
    thresholds: &[f64],
    merge_gap: usize,
    min_width: usize,
    smear: usize,
) -> Result<Vec<SweepRow>> {
    if thresholds.is_empty() {
        return Err(Error::InvalidInput(
            "threshold sweep needs at least one threshold".into(),
        ));
    }
    if let Some(t) = thresholds.iter().find(|t| t.is_nan() || **t < 0.0) {
        return Err(Error::InvalidInput(format!("threshold {t} is negative or NaN")));
    }
    Ok(thresholds
        .iter()
        .map(|&t| {
            let events = threshold_detect(profile, t, merge_gap, min_width);
            let report = match_attacks(&events, attacks, profile.window(), smear);
            SweepRow {
                threshold: t,
                detected: report.metrics.detected,
                false_positives: report.metrics.false_positives,
                alarmed: profile.distances().iter().filter(|&&d| is_alarm(d, t)).count(),
            }
        })
        .collect())
}

/// `start,end,peak,width,matched_attack`; matched attacks are indices into
/// the report's attack list, `;`-separated, empty when unmatched.
pub fn events_csv(events: &[AnomalyEvent], matches: &[Match]) -> String {
    let mut out = String::from("start,end,peak,width,matched_attack\n");
    for (i, e) in events.iter().enumerate() {
        let matched: Vec<String> = matches
            .iter()
            .filter(|m| m.event == i)
            .map(|m| m.attack.to_string())
            .collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            e.start,
            e.end,
            fmt_sig(e.peak, 9),
            e.width,
            matched.join(";")
        );
    }
    out
}

pub fn write_events(path: &Path, events: &[AnomalyEvent], matches: &[Match]) -> Result<()> {
    write_atomic(path, events_csv(events, matches).as_bytes())
}

pub fn write_report(path: &Path, report: &DetectionReport) -> Result<()> {
    let mut json = serde_json::to_string_pretty(report).expect("report serializes");
    json.push('\n');
    write_atomic(path, json.as_bytes())
}

pub fn read_report(path: &Path) -> Result<DetectionReport> {
    let text = crate::fsutil::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line() as u64,
        column: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("threshold,detected,false_positives,alarmed\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_sig(r.threshold, 9),
            r.detected,
            r.false_positives,
            r.alarmed
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn attack(start: usize, end: usize) -> AttackInterval {
        AttackInterval {
            start,
            end,
            targets: vec!["P-102".into()],
            category: AttackCategory::Sssp,
            affects_process: true,
        }
    }

    fn event(start: usize, end: usize) -> AnomalyEvent {
        AnomalyEvent {
            start,
            end,
            peak: 0.5,
            width: end - start + 1,
        }
    }

    #[test]
    fn single_run_above_threshold() {
        let ev = detect_runs(&[0.0, 0.0, 0.05, 0.2, 0.3, 0.08, 0.0], 0.1, 0, 1);
        assert_eq!(
            ev,
            vec![AnomalyEvent {
                start: 3,
                end: 4,
                peak: 0.3,
                width: 2
            }]
        );
    }

    #[test]
    fn nothing_fires_on_zero_profile() {
        assert!(detect_runs(&[0.0; 10], 0.1, 0, 1).is_empty());
        assert!(detect_runs(&[0.0; 10], 0.0, 0, 1).is_empty());
        assert!(detect_runs(&[], 0.1, 0, 1).is_empty());
    }

    #[test]
    fn gap_merging_and_min_width() {
        let ev = detect_runs(&[0.2, 0.0, 0.2], 0.1, 1, 1);
        assert_eq!(ev.len(), 1);
        assert_eq!((ev[0].start, ev[0].end, ev[0].width), (0, 2, 3));

        let ev = detect_runs(&[0.2, 0.0, 0.2], 0.1, 0, 1);
        assert_eq!(ev.len(), 2);

        let ev = detect_runs(&[0.2, 0.0, 0.0, 0.3, 0.3, 0.3], 0.1, 0, 2);
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].start, 3);
    }

    #[test]
    fn threshold_zero_spans_each_positive_run() {
        let ev = detect_runs(&[0.0, 0.01, 0.02, 0.0, 0.0, 0.5, 0.0], 0.0, 0, 1);
        let spans: Vec<_> = ev.iter().map(|e| (e.start, e.end)).collect();
        assert_eq!(spans, vec![(1, 2), (5, 5)]);
    }

    #[test]
    fn empty_match() {
        let r = match_attacks(&[], &[], 10, 10);
        assert_eq!(r.metrics.detected, 0);
        assert_eq!(r.metrics.false_positives, 0);
        assert_eq!(r.metrics.missed, 0);
    }

    #[test]
    fn perfect_overlap() {
        let r = match_attacks(&[event(100, 150)], &[attack(100, 150)], 1, 1);
        assert_eq!(r.metrics.detected, 1);
        assert_eq!(r.metrics.false_positives, 0);
        assert_eq!(r.metrics.delays, vec![Some(0)]);
        assert_eq!(r.matches, vec![Match { attack: 0, event: 0 }]);
    }

    #[test]
    fn back_to_back_attacks_under_one_peak() {
        let attacks = [attack(1000, 1499), attack(1500, 9000)];
        let r = match_attacks(&[event(900, 9100)], &attacks, 200, 200);
        assert_eq!(r.metrics.detected, 2);
        assert_eq!(r.metrics.false_positives, 0);
        assert_eq!(r.metrics.delays, vec![Some(0), Some(0)]);
    }

    #[test]
    fn window_coverage_and_smear() {
        // window at 50 with m = 60 covers samples 50..=109
        let r = match_attacks(&[event(50, 50)], &[attack(109, 120)], 60, 0);
        assert_eq!(r.metrics.detected, 1);
        let r = match_attacks(&[event(50, 50)], &[attack(110, 120)], 60, 0);
        assert_eq!(r.metrics.detected, 0);
        assert_eq!(r.metrics.false_positives, 1);
        // an alarm after the attack end counts within the smear allowance
        let r = match_attacks(&[event(130, 140)], &[attack(100, 120)], 5, 10);
        assert_eq!(r.metrics.detected, 1);
        assert_eq!(r.metrics.delays, vec![Some(30)]);
        let r = match_attacks(&[event(131, 140)], &[attack(100, 120)], 1, 10);
        assert_eq!(r.metrics.detected, 0);
    }

    #[test]
    fn overlapping_attacks_form_one_group() {
        let attacks = [attack(100, 500), attack(200, 300)];
        let r = match_attacks(&[event(450, 460)], &attacks, 1, 0);
        assert_eq!(r.metrics.detected, 2);
        assert_eq!(r.metrics.delays, vec![Some(350), Some(250)]);
        // the event lies outside the inner attack's own window
        assert_eq!(r.matches, vec![Match { attack: 0, event: 0 }]);
    }

    #[test]
    fn unmatched_events_are_false_positives() {
        let r = match_attacks(&[event(0, 3), event(10, 12)], &[], 2, 2);
        assert_eq!(r.metrics.false_positives, 2);
    }

    #[test]
    fn order_does_not_matter() {
        let events = [event(500, 510), event(10, 20), event(200, 230)];
        let attacks = [attack(205, 240), attack(0, 15)];
        let a = match_attacks(&events, &attacks, 5, 5);
        let mut ev = events.to_vec();
        ev.reverse();
        let mut at = attacks.to_vec();
        at.reverse();
        assert_eq!(a, match_attacks(&ev, &at, 5, 5));
    }

    #[test]
    fn category_parsing() {
        assert_eq!("ssmp".parse::<AttackCategory>().unwrap(), AttackCategory::Ssmp);
        assert!("XX".parse::<AttackCategory>().is_err());
    }

    #[test]
    fn events_csv_format() {
        let ev = [event(3, 4)];
        let csv = events_csv(&ev, &[Match { attack: 1, event: 0 }]);
        assert_eq!(csv, "start,end,peak,width,matched_attack\n3,4,0.5,2,1\n");
    }
}

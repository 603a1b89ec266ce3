//! Deterministic stand-in for a water-treatment historian export.
//!
//! Pumps run square waves, backup pumps idle at 0, motorised valves cycle
//! through a tertiary state pattern, and tank levels integrate the activity
//! of the pumps that drain them. Attacks overwrite actuator values over a
//! span and mark those samples as attacked.
//!
//! Specs are TOML documents:
//!
//! ```toml
//! length = 2000
//! seed = 7
//!
//! [[channel]]
//! name = "P-101"
//! kind = "pump"
//! period = 700
//! duty = 0.5
//!
//! [[attack]]
//! channel = "P-101"
//! start = 1400
//! duration = 350
//! type = "force_off"
//! ```

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ProcessLog;
use crate::detect::{AttackCategory, AttackInterval};
use crate::distance::{Channel, ChannelKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub length: usize,
    pub seed: u64,
    /// Suggested profile window for this data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(default, rename = "channel")]
    pub channels: Vec<ChannelSpec>,
    #[serde(default, rename = "attack")]
    pub attacks: Vec<AttackSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub name: String,
    #[serde(flatten)]
    pub signal: SignalSpec,
    /// Per-sample probability of flipping an actuator state.
    #[serde(default)]
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalSpec {
    /// On for the first `round(duty * period)` samples of every period.
    Pump {
        period: usize,
        duty: f64,
        #[serde(default)]
        phase: usize,
    },
    /// Constantly off.
    Backup {
        #[serde(default)]
        period: Option<usize>,
    },
    /// Cycles through `(state, samples)` segments covering one period.
    Valve {
        period: usize,
        pattern: Vec<(u8, usize)>,
        #[serde(default)]
        phase: usize,
    },
    /// Tank level: falls by `drain` per sample while any driver runs and
    /// rises by `fill` otherwise.
    Level {
        drivers: Vec<String>,
        base: f64,
        fill: f64,
        drain: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackAction {
    ForceOn,
    ForceOff,
    ForceOpen,
}

impl AttackAction {
    fn value(self) -> f64 {
        match self {
            AttackAction::ForceOn => 1.0,
            AttackAction::ForceOff => 0.0,
            AttackAction::ForceOpen => 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackSpec {
    pub channel: String,
    pub start: usize,
    pub duration: usize,
    #[serde(rename = "type")]
    pub action: AttackAction,
    /// Attacks sharing a group form one ground-truth entry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<AttackCategory>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affects_process: Option<bool>,
}

impl SynthSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: SynthSpec = toml::from_str(text).map_err(|e| Error::Spec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = crate::fsutil::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Spec(msg) => Error::Spec(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn find(&self, name: &str) -> Option<&ChannelSpec> {
        self.channels.iter().find(|c| c.name == name)
    }

    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(Error::Spec(msg));
        for (i, c) in self.channels.iter().enumerate() {
            if self.channels[..i].iter().any(|o| o.name == c.name) {
                return err(format!("duplicate channel `{}`", c.name));
            }
            if !(0.0..=1.0).contains(&c.noise) {
                return err(format!("channel `{}`: noise {} outside [0, 1]", c.name, c.noise));
            }
            match &c.signal {
                SignalSpec::Pump { period, duty, .. } => {
                    if *period < 2 {
                        return err(format!("channel `{}`: period must be >= 2", c.name));
                    }
                    if !(*duty > 0.0 && *duty < 1.0) {
                        return err(format!("channel `{}`: duty {duty} outside (0, 1)", c.name));
                    }
                    let on = on_samples(*period, *duty);
                    if on == 0 || on == *period {
                        return err(format!(
                            "channel `{}`: duty {duty} leaves no on or off phase in period {period}",
                            c.name
                        ));
                    }
                }
                SignalSpec::Backup { period } => {
                    if matches!(period, Some(p) if *p < 2) {
                        return err(format!("channel `{}`: period must be >= 2", c.name));
                    }
                }
                SignalSpec::Valve { period, pattern, .. } => {
                    if *period < 2 {
                        return err(format!("channel `{}`: period must be >= 2", c.name));
                    }
                    if pattern.iter().any(|&(s, len)| s > 2 || len == 0) {
                        return err(format!(
                            "channel `{}`: valve states must be 0, 1 or 2 with nonzero durations",
                            c.name
                        ));
                    }
                    let total: usize = pattern.iter().map(|p| p.1).sum();
                    if total != *period {
                        return err(format!(
                            "channel `{}`: pattern covers {total} samples, period is {period}",
                            c.name
                        ));
                    }
                }
                SignalSpec::Level {
                    drivers,
                    base,
                    fill,
                    drain,
                } => {
                    if !(base.is_finite() && fill.is_finite() && drain.is_finite()) {
                        return err(format!("channel `{}`: level parameters must be finite", c.name));
                    }
                    for d in drivers {
                        match self.find(d) {
                            None => return err(format!("channel `{}`: unknown driver `{d}`", c.name)),
                            Some(ChannelSpec {
                                signal: SignalSpec::Level { .. },
                                ..
                            }) => return err(format!("channel `{}`: driver `{d}` is a level", c.name)),
                            Some(_) => {}
                        }
                    }
                }
            }
        }

        for a in &self.attacks {
            let Some(target) = self.find(&a.channel) else {
                return err(format!("attack on unknown channel `{}`", a.channel));
            };
            if a.duration == 0 || a.start + a.duration > self.length {
                return err(format!(
                    "attack on `{}` spans {}..{} outside [0, {})",
                    a.channel,
                    a.start,
                    a.start + a.duration,
                    self.length
                ));
            }
            match (&target.signal, a.action) {
                (SignalSpec::Level { .. }, _) => {
                    return err(format!("attack on level channel `{}`", a.channel));
                }
                (SignalSpec::Valve { .. }, _) | (_, AttackAction::ForceOn | AttackAction::ForceOff) => {}
                (_, AttackAction::ForceOpen) => {
                    return err(format!("force_open applies to valves, `{}` is not one", a.channel));
                }
            }
        }
        Ok(())
    }

    /// One entry per attack group, ordered by start.
    pub fn ground_truth(&self) -> Vec<AttackInterval> {
        let mut groups: Vec<(Option<&str>, AttackInterval, Option<AttackCategory>)> = Vec::new();
        for a in &self.attacks {
            let end = a.start + a.duration - 1;
            let existing = a
                .group
                .as_deref()
                .and_then(|g| groups.iter_mut().find(|(k, ..)| *k == Some(g)));
            match existing {
                Some((_, iv, category)) => {
                    iv.start = iv.start.min(a.start);
                    iv.end = iv.end.max(end);
                    if !iv.targets.contains(&a.channel) {
                        iv.targets.push(a.channel.clone());
                    }
                    *category = category.or(a.category);
                    if let Some(affects) = a.affects_process {
                        iv.affects_process &= affects;
                    }
                }
                None => groups.push((
                    a.group.as_deref(),
                    AttackInterval {
                        start: a.start,
                        end,
                        targets: vec![a.channel.clone()],
                        category: AttackCategory::Sssp,
                        affects_process: a.affects_process.unwrap_or(true),
                    },
                    a.category,
                )),
            }
        }
        let mut out: Vec<AttackInterval> = groups
            .into_iter()
            .map(|(_, mut iv, category)| {
                iv.category = category.unwrap_or(if iv.targets.len() > 1 {
                    AttackCategory::Ssmp
                } else {
                    AttackCategory::Sssp
                });
                iv
            })
            .collect();
        out.sort();
        out
    }
}

fn on_samples(period: usize, duty: f64) -> usize {
    (duty * period as f64).round() as usize
}

/// Renders the spec into a labeled log.
///
/// Order of construction: periodic base signals, attack overwrites, tank
/// levels from the attacked drivers, then seeded state-flip noise.
pub fn generate(spec: &SynthSpec) -> Result<ProcessLog> {
    spec.validate()?;
    let n = spec.length;
    if n == 0 {
        return Ok(ProcessLog::empty());
    }

    let mut columns: Vec<Vec<f64>> = spec
        .channels
        .iter()
        .map(|c| match &c.signal {
            SignalSpec::Pump { period, duty, phase } => {
                let on = on_samples(*period, *duty);
                (0..n)
                    .map(|t| if (t + phase) % period < on { 1.0 } else { 0.0 })
                    .collect()
            }
            SignalSpec::Backup { .. } | SignalSpec::Level { .. } => vec![0.0; n],
            SignalSpec::Valve { period, pattern, phase } => {
                let cycle: Vec<f64> = pattern
                    .iter()
                    .flat_map(|&(state, len)| std::iter::repeat_n(f64::from(state), len))
                    .collect();
                (0..n).map(|t| cycle[(t + phase) % period]).collect()
            }
        })
        .collect();

    let index = |name: &str| spec.channels.iter().position(|c| c.name == name).expect("validated");
    let mut labels = vec![false; n];
    for a in &spec.attacks {
        let span = a.start..a.start + a.duration;
        columns[index(&a.channel)][span.clone()].fill(a.action.value());
        labels[span].fill(true);
    }

    for (k, c) in spec.channels.iter().enumerate() {
        if let SignalSpec::Level {
            drivers,
            base,
            fill,
            drain,
        } = &c.signal
        {
            let driver_cols: Vec<usize> = drivers.iter().map(|d| index(d)).collect();
            let (mut on, mut off) = (0u64, 0u64);
            let mut level = vec![0.0; n];
            for (t, v) in level.iter_mut().enumerate() {
                // integer counts keep an exactly periodic drive exactly periodic
                *v = base + fill * off as f64 - drain * on as f64;
                if driver_cols.iter().any(|&d| columns[d][t] != 0.0) {
                    on += 1;
                } else {
                    off += 1;
                }
            }
            columns[k] = level;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for (c, values) in spec.channels.iter().zip(columns.iter_mut()) {
        if c.noise <= 0.0 || matches!(c.signal, SignalSpec::Level { .. }) {
            continue;
        }
        let tertiary = matches!(c.signal, SignalSpec::Valve { .. });
        for v in values.iter_mut() {
            if rng.gen_bool(c.noise) {
                *v = if tertiary {
                    ((*v as u8 + rng.gen_range(1..3)) % 3) as f64
                } else {
                    1.0 - v.min(1.0)
                };
            }
        }
    }

    let channels = spec
        .channels
        .iter()
        .zip(columns)
        .map(|(c, values)| {
            let kind = match c.signal {
                SignalSpec::Level { .. } => ChannelKind::Continuous,
                _ => ChannelKind::Discrete,
            };
            Channel::with_kind(c.name.clone(), values, kind)
        })
        .collect::<Result<Vec<_>>>()?;
    ProcessLog::new(channels, Some(labels))
}

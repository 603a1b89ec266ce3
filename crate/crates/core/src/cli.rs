//! Command-line front end: `profile`, `detect`, `eval`, `synth` and `plot`.
//!
//! Every flag may also come from a `key=value` config file given with
//! `--config`; keys are the long flag names. Flags on the command line win,
//! and relative paths in a config file resolve against the file's directory.
//! Each command writes into the `--out` directory and returns the paths it
//! wrote.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::dataio::{read_csv, read_ground_truth, write_csv, write_ground_truth, CsvOptions, ProcessLog, SynthSpec};
use crate::detect::{
    match_attacks, sweep_csv, sweep_thresholds, threshold_detect, write_events, write_report, AttackInterval,
};
use crate::distance::{znorm_distance, Channel, ChannelKind};
use crate::error::{Error, Result};
use crate::fsutil::{read_to_string, write_atomic};
use crate::plot::{render_svg, Figure};
use crate::profile::{
    default_exclusion, mp_brute, mp_hamming_fast, mp_znorm_fast, read_profile, select_metric, write_profile,
    MatrixProfile, Metric,
};

pub const DEFAULT_WINDOW: usize = 2000;
pub const DEFAULT_THRESHOLD: f64 = 0.1;

/// Largest tolerated gap between the fast and the brute z-normalized profile.
const VERIFY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "mpscan",
    version,
    about = "Matrix-profile anomaly detection for process logs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the matrix profile of each selected channel.
    Profile(Flags),
    /// Threshold profiles into anomaly events.
    Detect(Flags),
    /// Score events against a ground-truth file.
    Eval(Flags),
    /// Generate a labelled process log from a spec.
    Synth(Flags),
    /// Draw values, minimal distances and attacks as SVG.
    Plot(Flags),
}

#[derive(Debug, Default, Clone, clap::Args)]
struct Flags {
    /// Process log CSV, or the spec file for `synth`.
    #[arg(long, alias = "spec")]
    input: Option<PathBuf>,
    /// Channels to process, comma-separated; all when omitted.
    #[arg(long, value_delimiter = ',')]
    channel: Vec<String>,
    #[arg(short = 'm', long)]
    window: Option<usize>,
    /// auto, znorm or hamming.
    #[arg(long)]
    metric: Option<String>,
    #[arg(long)]
    exclusion: Option<usize>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    merge_gap: Option<usize>,
    #[arg(long)]
    min_width: Option<usize>,
    /// Samples after an attack's end that still count as detecting it.
    #[arg(long)]
    smear: Option<usize>,
    /// Thresholds to sweep, comma-separated.
    #[arg(long, value_delimiter = ',')]
    sweep: Vec<f64>,
    /// Check the fast profile against the direct evaluation.
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Ground-truth attack CSV.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Precomputed profile CSVs, comma-separated.
    #[arg(long, value_delimiter = ',')]
    profile: Vec<PathBuf>,
    /// CSV with a `Label` column for the attack panel.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// `key=value` file supplying defaults for any flag.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    /// Empty means every channel.
    pub channels: Vec<String>,
    pub window: usize,
    /// `None` picks the metric from the channel kind.
    pub metric: Option<Metric>,
    /// Defaults to half the window, rounded up.
    pub exclusion: Option<usize>,
    pub threshold: f64,
    pub merge_gap: usize,
    pub min_width: usize,
    /// Defaults to the window length.
    pub smear: Option<usize>,
    pub sweep: Vec<f64>,
    pub verify: bool,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub truth: Option<PathBuf>,
    pub profiles: Vec<PathBuf>,
    pub labels: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            channels: Vec::new(),
            window: DEFAULT_WINDOW,
            metric: None,
            exclusion: None,
            threshold: DEFAULT_THRESHOLD,
            merge_gap: 0,
            min_width: 1,
            smear: None,
            sweep: Vec::new(),
            verify: false,
            threads: None,
            seed: None,
            out: PathBuf::from("."),
            truth: None,
            profiles: Vec::new(),
            labels: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::Usage(format!("window must be at least 2, got {}", self.window)));
        }
        if !self.threshold.is_finite() || self.threshold < 0.0 {
            return Err(Error::Usage(format!(
                "threshold must be a finite non-negative number, got {}",
                self.threshold
            )));
        }
        if let Some(t) = self.sweep.iter().find(|t| !t.is_finite() || **t < 0.0) {
            return Err(Error::Usage(format!(
                "sweep threshold {t} is not a finite non-negative number"
            )));
        }
        if self.threads == Some(0) {
            return Err(Error::Usage("--threads must be at least 1".into()));
        }
        Ok(())
    }

    pub fn exclusion(&self) -> usize {
        self.exclusion.unwrap_or_else(|| default_exclusion(self.window))
    }

    pub fn smear(&self, window: usize) -> usize {
        self.smear.unwrap_or(window)
    }

    fn input(&self) -> Result<&Path> {
        self.input
            .as_deref()
            .ok_or_else(|| Error::Usage("--input is required".into()))
    }
}

/// Parses a `key=value` config file. Blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("config line {}: expected key=value", k + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

fn resolve(flags: Flags) -> Result<RunConfig> {
    let (file, base) = match &flags.config {
        Some(path) => {
            let map = parse_config(&read_to_string(path)?)?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            (map, base)
        }
        None => (BTreeMap::new(), PathBuf::new()),
    };
    for key in file.keys() {
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(Error::Usage(format!("unknown config key `{key}`")));
        }
    }
    let get = |key: &str| file.get(key).map(String::as_str);
    let path = |key: &str| get(key).map(|v| base.join(v));
    let list = |key: &str| -> Vec<String> {
        get(key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(String::from)
                    .collect()
            })
            .unwrap_or_default()
    };

    let defaults = RunConfig::default();
    let metric = match flags.metric.as_deref().or(get("metric")) {
        None => None,
        Some(s) if s.trim().eq_ignore_ascii_case("auto") => None,
        Some(s) => Some(s.parse()?),
    };
    let verify = flags.verify
        || match get("verify") {
            None => false,
            Some(v) => parse_value::<bool>("verify", v)?,
        };
    let config = RunConfig {
        input: flags.input.or_else(|| path("input")),
        channels: if flags.channel.is_empty() {
            list("channel")
        } else {
            flags.channel
        },
        window: pick(flags.window, get("window").or(get("m")), "window")?.unwrap_or(defaults.window),
        metric,
        exclusion: pick(flags.exclusion, get("exclusion"), "exclusion")?,
        threshold: pick(flags.threshold, get("threshold"), "threshold")?.unwrap_or(defaults.threshold),
        merge_gap: pick(flags.merge_gap, get("merge-gap"), "merge-gap")?.unwrap_or(defaults.merge_gap),
        min_width: pick(flags.min_width, get("min-width"), "min-width")?.unwrap_or(defaults.min_width),
        smear: pick(flags.smear, get("smear"), "smear")?,
        sweep: if flags.sweep.is_empty() {
            list("sweep")
                .iter()
                .map(|v| parse_value("sweep", v))
                .collect::<Result<_>>()?
        } else {
            flags.sweep
        },
        verify,
        threads: pick(flags.threads, get("threads"), "threads")?,
        seed: pick(flags.seed, get("seed"), "seed")?,
        out: flags.out.or_else(|| path("out")).unwrap_or(defaults.out),
        truth: flags.truth.or_else(|| path("truth")),
        profiles: if flags.profile.is_empty() {
            list("profile").iter().map(|p| base.join(p)).collect()
        } else {
            flags.profile
        },
        labels: flags.labels.or_else(|| path("labels")),
    };
    config.validate()?;
    Ok(config)
}

const CONFIG_KEYS: [&str; 19] = [
    "input",
    "spec",
    "channel",
    "window",
    "m",
    "metric",
    "exclusion",
    "threshold",
    "merge-gap",
    "min-width",
    "smear",
    "sweep",
    "verify",
    "threads",
    "seed",
    "out",
    "truth",
    "profile",
    "labels",
];

fn pick<T: std::str::FromStr>(flag: Option<T>, file: Option<&str>, key: &str) -> Result<Option<T>> {
    match (flag, file) {
        (Some(v), _) => Ok(Some(v)),
        (None, Some(raw)) => parse_value(key, raw).map(Some),
        (None, None) => Ok(None),
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| Error::Usage(format!("config value `{raw}` is not valid for `{key}`")))
}

type Handler = fn(&RunConfig) -> Result<Vec<PathBuf>>;

fn prepare(cli: Cli) -> Result<(RunConfig, Handler)> {
    let (flags, handler): (Flags, Handler) = match cli.command {
        Command::Profile(f) => (f, cmd_profile),
        Command::Detect(f) => (f, cmd_detect),
        Command::Eval(f) => (f, cmd_eval),
        Command::Synth(mut f) => {
            // a config file may name the spec with `spec=`
            if f.input.is_none() {
                if let Some(conf) = f.config.as_deref() {
                    f.input = spec_from_config(conf)?;
                }
            }
            (f, cmd_synth)
        }
        Command::Plot(f) => (f, cmd_plot),
    };
    Ok((resolve(flags)?, handler))
}

fn spec_from_config(path: &Path) -> Result<Option<PathBuf>> {
    let map = parse_config(&read_to_string(path)?)?;
    let base = path.parent().unwrap_or(Path::new(""));
    Ok(map.get("spec").map(|s| base.join(s)))
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Result<Vec<PathBuf>>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::Usage(e.to_string()))?;
    let (config, handler) = prepare(cli)?;
    handler(&config)
}

/// Runs the command line and returns the process exit code, reporting
/// errors on stderr.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // --help and --version are not failures
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match prepare(cli).and_then(|(config, handler)| handler(&config)) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            0
        }
        Err(e) => report(&e),
    }
}

fn report(e: &Error) -> i32 {
    eprintln!("mpscan: {e}");
    e.exit_code()
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Usage(format!("cannot start {n} worker threads: {e}")))?
            .install(f),
    }
}

/// File-name-safe form of a channel name.
fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "-_.".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn load_log(config: &RunConfig) -> Result<ProcessLog> {
    let options = CsvOptions {
        channels: (!config.channels.is_empty()).then(|| config.channels.clone()),
        ..CsvOptions::default()
    };
    let log = read_csv(config.input()?, &options)?;
    if log.is_empty() {
        return Err(Error::InvalidData(format!(
            "{} holds no samples",
            config.input()?.display()
        )));
    }
    Ok(log)
}

/// Computes one channel's profile with the configured or inferred metric.
pub fn compute_profile(channel: &Channel, config: &RunConfig) -> Result<MatrixProfile> {
    let metric = match config.metric {
        Some(Metric::Hamming) if channel.kind() != ChannelKind::Discrete => {
            return Err(Error::MetricMismatch {
                channel: channel.name().to_string(),
            })
        }
        Some(m) => m,
        None => select_metric(channel, crate::distance::DEFAULT_ALPHABET_CAP),
    };
    let m = config.window;
    let exclusion = config.exclusion();
    let fast = match metric {
        Metric::Znorm => mp_znorm_fast(channel, m, exclusion)?,
        Metric::Hamming => mp_hamming_fast(channel, m, exclusion)?,
    };
    if config.verify {
        let oracle = mp_brute(channel, m, metric, exclusion)?;
        verify(channel, &fast, &oracle)?;
    }
    Ok(fast)
}

fn verify(channel: &Channel, fast: &MatrixProfile, oracle: &MatrixProfile) -> Result<()> {
    let m = fast.window();
    let x = channel.values();
    for i in 0..fast.len() {
        let (df, jf) = (fast.distances()[i], fast.nn_index()[i]);
        let (db, jb) = (oracle.distances()[i], oracle.nn_index()[i]);
        let agree = match fast.metric() {
            Metric::Hamming => df == db && jf == jb,
            // A different neighbor is acceptable only when it is an exact tie.
            Metric::Znorm => {
                (df - db).abs() <= VERIFY_TOLERANCE
                    && (jf == jb || {
                        let direct = znorm_distance(&x[i..i + m], &x[jf..jf + m])?;
                        (direct - db).abs() <= VERIFY_TOLERANCE
                    })
            }
        };
        if !agree {
            return Err(Error::Inconsistency(format!(
                "channel `{}` position {i}: fast profile gives ({df}, {jf}), direct evaluation gives ({db}, {jb})",
                channel.name()
            )));
        }
    }
    Ok(())
}

/// Profiles named by `--profile`, or computed from `--input`, with their channels.
fn profiles(config: &RunConfig) -> Result<Vec<(String, MatrixProfile)>> {
    if !config.profiles.is_empty() {
        let mut out = Vec::new();
        for path in &config.profiles {
            let (profile, meta) = read_profile(path)?;
            if config.channels.is_empty() || config.channels.contains(&meta.channel) {
                out.push((meta.channel, profile));
            }
        }
        if out.is_empty() {
            return Err(Error::Usage("no profile matches the selected channels".into()));
        }
        return Ok(out);
    }
    let log = load_log(config)?;
    with_pool(config.threads, || {
        log.channels()
            .iter()
            .map(|c| Ok((c.name().to_string(), compute_profile(c, config)?)))
            .collect()
    })
}

pub fn cmd_profile(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let log = load_log(config)?;
    let mut written = Vec::new();
    for channel in log.channels() {
        let profile = with_pool(config.threads, || compute_profile(channel, config))?;
        let path = config.out.join(format!("{}.profile.csv", file_stem(channel.name())));
        write_profile(&path, &profile, channel.name())?;
        written.push(path);
    }
    Ok(written)
}

fn truth(config: &RunConfig) -> Result<Option<Vec<AttackInterval>>> {
    config.truth.as_deref().map(read_ground_truth).transpose()
}

pub fn cmd_detect(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let attacks = truth(config)?;
    let mut written = Vec::new();
    for (name, profile) in profiles(config)? {
        let events = threshold_detect(&profile, config.threshold, config.merge_gap, config.min_width);
        let matches = match &attacks {
            Some(a) => match_attacks(&events, a, profile.window(), config.smear(profile.window())).matches,
            None => Vec::new(),
        };
        let path = config.out.join(format!("{}.events.csv", file_stem(&name)));
        write_events(&path, &events, &matches)?;
        written.push(path);
    }
    Ok(written)
}

pub fn cmd_eval(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let attacks = truth(config)?.ok_or_else(|| Error::Usage("eval needs a ground-truth file (--truth)".into()))?;
    let mut written = Vec::new();
    for (name, profile) in profiles(config)? {
        let m = profile.window();
        let smear = config.smear(m);
        let events = threshold_detect(&profile, config.threshold, config.merge_gap, config.min_width);
        let report = match_attacks(&events, &attacks, m, smear);
        let stem = file_stem(&name);

        let path = config.out.join(format!("{stem}.events.csv"));
        write_events(&path, &report.events, &report.matches)?;
        written.push(path);
        let path = config.out.join(format!("{stem}.report.json"));
        write_report(&path, &report)?;
        written.push(path);
        if !config.sweep.is_empty() {
            let rows = sweep_thresholds(
                &profile,
                &attacks,
                &config.sweep,
                config.merge_gap,
                config.min_width,
                smear,
            )?;
            let path = config.out.join(format!("{stem}.sweep.csv"));
            write_atomic(&path, sweep_csv(&rows).as_bytes())?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Writes `<stem>.csv`, `<stem>.truth.csv` and a `<stem>.conf` that points
/// later commands at both with the spec's suggested window.
pub fn cmd_synth(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let spec_path = config.input()?;
    let mut spec = SynthSpec::load(spec_path)?;
    if let Some(seed) = config.seed {
        spec.seed = seed;
    }
    let log = crate::dataio::generate(&spec)?;
    let stem = spec_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "synth".into());

    let log_path = config.out.join(format!("{stem}.csv"));
    write_csv(&log_path, &log)?;
    let truth_path = config.out.join(format!("{stem}.truth.csv"));
    write_ground_truth(&truth_path, &spec.ground_truth())?;

    let mut conf = format!("input={stem}.csv\ntruth={stem}.truth.csv\n");
    if let Some(m) = spec.window {
        conf.push_str(&format!("window={m}\n"));
    }
    let conf_path = config.out.join(format!("{stem}.conf"));
    write_atomic(&conf_path, conf.as_bytes())?;
    Ok(vec![log_path, truth_path, conf_path])
}

pub fn cmd_plot(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let log = load_log(config)?;
    let profiles = profiles(config)?;
    let labels: Option<Vec<bool>> = if let Some(attacks) = truth(config)? {
        let mut v = vec![false; log.len()];
        for a in &attacks {
            if a.end >= log.len() {
                return Err(Error::InvalidInput(format!(
                    "attack {}..={} lies beyond the {} plotted samples",
                    a.start,
                    a.end,
                    log.len()
                )));
            }
            v[a.start..=a.end].fill(true);
        }
        Some(v)
    } else if let Some(path) = &config.labels {
        let options = CsvOptions {
            channels: Some(Vec::new()),
            ..CsvOptions::default()
        };
        let file = read_csv(path, &options)?;
        Some(
            file.labels()
                .ok_or_else(|| Error::Schema(format!("{} has no label column", path.display())))?
                .to_vec(),
        )
    } else {
        log.labels().map(<[bool]>::to_vec)
    };

    let title = match config.input.as_deref().and_then(Path::file_stem) {
        Some(stem) => format!(
            "{}: {}",
            stem.to_string_lossy(),
            log.channel_names().collect::<Vec<_>>().join(", ")
        ),
        None => log.channel_names().collect::<Vec<_>>().join(", "),
    };
    let figure = Figure {
        title,
        series: log.channels().iter().map(|c| (c.name(), c.values())).collect(),
        profiles: profiles.iter().map(|(n, p)| (n.as_str(), p)).collect(),
        labels: labels.as_deref(),
    };
    let svg = render_svg(&figure)?;
    let path = config.out.join("plot.svg");
    write_atomic(&path, svg.as_bytes())?;
    Ok(vec![path])
}

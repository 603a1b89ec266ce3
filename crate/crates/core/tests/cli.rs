use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mpscan::detect::read_report;
use mpscan::profile::read_profile;

fn mpscan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpscan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn spec(name: &str) -> String {
    format!("{}/specs/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Generates a bundled interval into `dir` and returns the log path.
fn synth(dir: &Path, name: &str) -> PathBuf {
    let out = mpscan(&["synth", "--input", &spec(&format!("{name}.spec")), "--out", s(dir)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    dir.join(format!("{name}.csv"))
}

const SMALL: &str = r#"
length = 1200
seed = 5
window = 100

[[channel]]
name = "P-1"
kind = "pump"
period = 90
duty = 0.4
noise = 0.01

[[channel]]
name = "LIT-1"
kind = "level"
drivers = ["P-1"]
base = 50.0
fill = 0.6
drain = 0.4

[[attack]]
channel = "P-1"
start = 700
duration = 120
type = "force_on"
"#;

fn small(dir: &Path) -> PathBuf {
    std::fs::create_dir_all(dir).unwrap();
    let spec = dir.join("small.spec");
    std::fs::write(&spec, SMALL).unwrap();
    let out = mpscan(&["synth", "--input", s(&spec), "--out", s(dir)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    dir.join("small.csv")
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&mpscan(&["--help"])), 0);
    assert_eq!(code(&mpscan(&["profile", "--help"])), 0);
    assert_eq!(code(&mpscan(&[])), 1);
    assert_eq!(code(&mpscan(&["profile", "--bogus"])), 1);
    assert_eq!(code(&mpscan(&["profile"])), 1);
    assert_eq!(code(&mpscan(&["profile", "--input", "x.csv", "-m", "1"])), 1);
    assert_eq!(code(&mpscan(&["detect", "--input", "x.csv", "--threshold", "-1"])), 1);
}

#[test]
fn backup_pump_profile_is_zero_before_its_attack() {
    let dir = tempfile::tempdir().unwrap();
    let log = synth(dir.path(), "interval1");
    let out = mpscan(&[
        "profile",
        "--input",
        s(&log),
        "--channel",
        "P-102",
        "-m",
        "2000",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let (profile, meta) = read_profile(&dir.path().join("P-102.profile.csv")).unwrap();
    assert_eq!(meta.window, 2000);
    assert_eq!(meta.exclusion, 1000);
    assert_eq!(meta.metric.to_string(), "hamming");
    assert_eq!(meta.series_len, 17203);
    // windows ending before the backup pump is switched on at sample 14000
    let last_clean = 14000 - 2000;
    assert!(profile.distances()[..=last_clean].iter().all(|&d| d == 0.0));
    assert!(profile.distances()[last_clean + 1] > 0.0);
}

#[test]
fn window_longer_than_series_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let log = small(dir.path());
    let out = mpscan(&["profile", "--input", s(&log), "-m", "5000", "--out", s(dir.path())]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("invalid window"), "{}", stderr(&out));
}

#[test]
fn hamming_on_a_continuous_channel_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let log = small(dir.path());
    let out = mpscan(&[
        "profile",
        "--input",
        s(&log),
        "--channel",
        "LIT-1",
        "--metric",
        "hamming",
        "-m",
        "100",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("metric mismatch"), "{}", stderr(&out));
}

#[test]
fn verify_accepts_the_fast_profile() {
    let dir = tempfile::tempdir().unwrap();
    let log = small(dir.path());
    let out = mpscan(&[
        "profile",
        "--input",
        s(&log),
        "-m",
        "100",
        "--verify",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(dir.path().join("P-1.profile.csv").exists());
    assert!(dir.path().join("P-1.profile.meta").exists());
    let (level, meta) = read_profile(&dir.path().join("LIT-1.profile.csv")).unwrap();
    assert_eq!(meta.metric.to_string(), "znorm");
    assert_eq!(level.len(), 1101);
}

#[test]
fn malformed_input_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "Timestamp,P-1\n0,1\n1,oops\n").unwrap();
    let out = mpscan(&["profile", "--input", s(&bad), "-m", "2"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
    let out = mpscan(&["profile", "--input", s(&dir.path().join("missing.csv"))]);
    assert_eq!(code(&out), 2);
}

#[test]
fn eval_needs_ground_truth() {
    let dir = tempfile::tempdir().unwrap();
    let log = small(dir.path());
    let out = mpscan(&["eval", "--input", s(&log), "-m", "100", "--out", s(dir.path())]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("ground-truth"), "{}", stderr(&out));
}

#[test]
fn threshold_above_one_finds_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let log = small(dir.path());
    let out = mpscan(&[
        "detect",
        "--input",
        s(&log),
        "--channel",
        "P-1",
        "-m",
        "100",
        "--threshold",
        "1.1",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let events = std::fs::read_to_string(dir.path().join("P-1.events.csv")).unwrap();
    assert_eq!(events, "start,end,peak,width,matched_attack\n");
}

#[test]
fn empty_truth_makes_every_event_a_false_positive() {
    let dir = tempfile::tempdir().unwrap();
    let log = small(dir.path());
    let truth = dir.path().join("none.csv");
    std::fs::write(&truth, "start,end,targets,category,affects_process\n").unwrap();
    let out = mpscan(&[
        "eval",
        "--input",
        s(&log),
        "--channel",
        "P-1",
        "-m",
        "100",
        "--threshold",
        "0.05",
        "--truth",
        s(&truth),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = read_report(&dir.path().join("P-1.report.json")).unwrap();
    assert!(!report.events.is_empty());
    assert_eq!(report.metrics.false_positives, report.events.len());
}

#[test]
fn eval_reports_detection_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    small(dir.path());
    let conf = dir.path().join("small.conf");
    let out = mpscan(&[
        "eval",
        "--config",
        s(&conf),
        "--channel",
        "P-1",
        "--sweep",
        "0,0.05,0.1,0.2,0.4",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = read_report(&dir.path().join("P-1.report.json")).unwrap();
    assert_eq!(report.attacks.len(), 1);
    assert_eq!(report.metrics.detected, 1);
    assert_eq!(report.metrics.false_positives, 0);
    let sweep = std::fs::read_to_string(dir.path().join("P-1.sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 6);
    assert!(sweep.starts_with("threshold,detected,false_positives,alarmed\n"));
}

#[test]
fn detect_reads_saved_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let log = small(dir.path());
    let out = mpscan(&[
        "profile",
        "--input",
        s(&log),
        "--channel",
        "P-1",
        "-m",
        "100",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let saved = dir.path().join("P-1.profile.csv");
    let from_file = dir.path().join("from_file");
    let out = mpscan(&["detect", "--profile", s(&saved), "--out", s(&from_file)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let direct = dir.path().join("direct");
    let out = mpscan(&[
        "detect",
        "--input",
        s(&log),
        "--channel",
        "P-1",
        "-m",
        "100",
        "--out",
        s(&direct),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(
        std::fs::read(from_file.join("P-1.events.csv")).unwrap(),
        std::fs::read(direct.join("P-1.events.csv")).unwrap()
    );
}

#[test]
fn config_supplies_flags_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    small(dir.path());
    let conf = dir.path().join("small.conf");
    let text = std::fs::read_to_string(&conf).unwrap();
    assert_eq!(text, "input=small.csv\ntruth=small.truth.csv\nwindow=100\n");

    let out = mpscan(&[
        "profile",
        "--config",
        s(&conf),
        "--channel",
        "P-1",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (_, meta) = read_profile(&dir.path().join("P-1.profile.csv")).unwrap();
    assert_eq!((meta.window, meta.exclusion), (100, 50));

    let out = mpscan(&[
        "profile",
        "--config",
        s(&conf),
        "--channel",
        "P-1",
        "-m",
        "60",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let (_, meta) = read_profile(&dir.path().join("P-1.profile.csv")).unwrap();
    assert_eq!((meta.window, meta.exclusion), (60, 30));
}

#[test]
fn plot_draws_both_pumps() {
    let dir = tempfile::tempdir().unwrap();
    let log = synth(dir.path(), "interval3");
    let out = mpscan(&[
        "plot",
        "--input",
        s(&log),
        "--channel",
        "P-101,P-102",
        "-m",
        "500",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let svg = std::fs::read_to_string(dir.path().join("plot.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    // two value traces and two distance traces
    assert_eq!(svg.matches("<polyline").count(), 4);
    assert!(svg.contains("minimal distance"));
}

#[test]
fn plot_rejects_labels_of_the_wrong_length() {
    let dir = tempfile::tempdir().unwrap();
    let log = small(dir.path());
    let labels = dir.path().join("labels.csv");
    std::fs::write(&labels, "Timestamp,Label\n0,Normal\n1,Attack\n").unwrap();
    let out = mpscan(&[
        "plot",
        "--input",
        s(&log),
        "-m",
        "100",
        "--labels",
        s(&labels),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("label"), "{}", stderr(&out));
}

#[test]
fn synth_is_repeatable_and_seedable() {
    let dir = tempfile::tempdir().unwrap();
    let a = small(&dir.path().join("a"));
    let b = small(&dir.path().join("b"));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let spec = dir.path().join("a/small.spec");
    let c = dir.path().join("c");
    let out = mpscan(&["synth", "--input", s(&spec), "--seed", "6", "--out", s(&c)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(c.join("small.csv")).unwrap());

    let bad = dir.path().join("bad.spec");
    std::fs::write(
        &bad,
        "length = 10\nseed = 1\n[[attack]]\nchannel = \"X\"\nstart = 0\nduration = 2\ntype = \"force_on\"\n",
    )
    .unwrap();
    let out = mpscan(&["synth", "--input", s(&bad), "--out", s(dir.path())]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("unknown channel"), "{}", stderr(&out));
}

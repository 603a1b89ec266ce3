//! Renders the third bundled interval: both pump channels, their Hamming
//! profiles at m = 500 and the attack indicator, as one SVG.
//!
//! cargo run --release --example plot -- interval3.svg

use std::path::PathBuf;

use mpscan::plot::{render_svg, Figure};
use mpscan::{default_exclusion, generate, mp_hamming_fast, SynthSpec};

fn main() -> mpscan::Result<()> {
    let out = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("interval3.svg"));

    let spec = SynthSpec::from_toml(include_str!("../specs/interval3.spec"))?;
    let log = generate(&spec)?;
    let m = spec.window.unwrap_or(500);
    let p101 = log.channel("P-101")?;
    let p102 = log.channel("P-102")?;
    let mp101 = mp_hamming_fast(p101, m, default_exclusion(m))?;
    let mp102 = mp_hamming_fast(p102, m, default_exclusion(m))?;

    let figure = Figure {
        title: "P-101 and P-102".into(),
        series: vec![("P-101", p101.values()), ("P-102", p102.values())],
        profiles: vec![("P-101", &mp101), ("P-102", &mp102)],
        labels: log.labels(),
    };
    let svg = render_svg(&figure)?;
    std::fs::write(&out, &svg).map_err(|e| mpscan::Error::InvalidInput(format!("{}: {e}", out.display())))?;
    println!("wrote {} ({} bytes)", out.display(), svg.len());
    Ok(())
}

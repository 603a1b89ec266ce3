//! Static SVG figure with three stacked panels sharing a sample axis:
//! channel values, minimal distances, and the attack indicator.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::profile::MatrixProfile;

const WIDTH: f64 = 1200.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const PANEL: f64 = 170.0;
const INDICATOR: f64 = 60.0;
const GAP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

const COLORS: [&str; 4] = ["#1f4e9c", "#c0392b", "#2e8b57", "#7d3c98"];
const DASHES: [&str; 4] = ["2,3", "8,4", "none", "12,3,2,3"];

/// Everything needed for one figure.
#[derive(Debug, Clone, Default)]
pub struct Figure<'a> {
    pub title: String,
    pub series: Vec<(&'a str, &'a [f64])>,
    pub profiles: Vec<(&'a str, &'a MatrixProfile)>,
    pub labels: Option<&'a [bool]>,
}

impl Figure<'_> {
    fn validate(&self) -> Result<usize> {
        let n = self
            .series
            .first()
            .map(|s| s.1.len())
            .or_else(|| self.profiles.first().map(|p| p.1.series_len()))
            .or_else(|| self.labels.map(<[bool]>::len))
            .ok_or_else(|| Error::InvalidInput("nothing to plot".into()))?;
        if n == 0 {
            return Err(Error::InvalidInput("cannot plot an empty series".into()));
        }
        for (name, values) in &self.series {
            if values.len() != n {
                return Err(Error::InvalidInput(format!(
                    "series `{name}` has {} samples, expected {n}",
                    values.len()
                )));
            }
        }
        for (name, p) in &self.profiles {
            if p.series_len() != n {
                return Err(Error::InvalidInput(format!(
                    "profile `{name}` covers {} samples, expected {n}",
                    p.series_len()
                )));
            }
        }
        if let Some(labels) = self.labels {
            if labels.len() != n {
                return Err(Error::InvalidInput(format!(
                    "label vector has {} entries, expected {n}",
                    labels.len()
                )));
            }
        }
        Ok(n)
    }
}

struct Axis {
    n: usize,
    plot_width: f64,
}

impl Axis {
    fn x(&self, sample: f64) -> f64 {
        LEFT + sample / (self.n.max(2) - 1) as f64 * self.plot_width
    }

    /// Column index for a sample when thinning to one point pair per pixel.
    fn column(&self, sample: usize) -> usize {
        ((sample as f64 / self.n.max(2) as f64) * self.plot_width) as usize
    }
}

pub fn render_svg(fig: &Figure<'_>) -> Result<String> {
    let n = fig.validate()?;
    let axis = Axis {
        n,
        plot_width: WIDTH - LEFT - RIGHT,
    };
    let height = TOP + 2.0 * PANEL + INDICATOR + 2.0 * GAP + BOTTOM;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="18" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(&fig.title)
    );

    let top1 = TOP;
    let top2 = top1 + PANEL + GAP;
    let top3 = top2 + PANEL + GAP;

    // values
    let (lo, hi) = range(fig.series.iter().flat_map(|s| s.1.iter().copied()));
    frame(&mut svg, top1, PANEL, "value", lo, hi);
    for (k, (name, values)) in fig.series.iter().enumerate() {
        trace(&mut svg, &axis, values, top1, PANEL, lo, hi, k);
        legend(&mut svg, k, name, top1);
    }

    // distances, plotted at the window start
    let max_d = fig
        .profiles
        .iter()
        .flat_map(|p| p.1.distances().iter().copied())
        .fold(0.0, f64::max);
    let (dlo, dhi) = (0.0, if max_d > 0.0 { max_d * 1.05 } else { 1.0 });
    frame(&mut svg, top2, PANEL, "minimal distance", dlo, dhi);
    for (k, (name, p)) in fig.profiles.iter().enumerate() {
        trace(&mut svg, &axis, p.distances(), top2, PANEL, dlo, dhi, k);
        legend(&mut svg, k, name, top2);
    }

    // attacks
    frame(&mut svg, top3, INDICATOR, "attack", 0.0, 1.0);
    if let Some(labels) = fig.labels {
        let mut t = 0;
        while t < n {
            if !labels[t] {
                t += 1;
                continue;
            }
            let start = t;
            while t < n && labels[t] {
                t += 1;
            }
            let x0 = axis.x(start as f64);
            let x1 = axis.x((t - 1) as f64).max(x0 + 0.5);
            let _ = writeln!(
                svg,
                r##"<rect x="{x0:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#444"/>"##,
                top3 + 10.0,
                x1 - x0,
                INDICATOR - 20.0
            );
        }
    }

    x_ticks(&mut svg, &axis, top3 + INDICATOR);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{:.2}" text-anchor="middle">sample</text>"#,
        LEFT + axis.plot_width / 2.0,
        height - 10.0
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = if hi > lo { (hi - lo) * 0.05 } else { 0.5 };
    (lo - pad, hi + pad)
}

fn frame(svg: &mut String, top: f64, height: f64, label: &str, lo: f64, hi: f64) {
    let w = WIDTH - LEFT - RIGHT;
    let _ = writeln!(
        svg,
        r##"<rect x="{LEFT}" y="{top:.2}" width="{w}" height="{height}" fill="none" stroke="#888"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{:.2}" transform="rotate(-90 14 {:.2})" text-anchor="middle">{label}</text>"#,
        top + height / 2.0,
        top + height / 2.0
    );
    for (v, y) in [(hi, top), (lo, top + height)] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 4.0,
            y + 4.0,
            short(v)
        );
    }
}

fn short(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[allow(clippy::too_many_arguments)]
fn trace(svg: &mut String, axis: &Axis, values: &[f64], top: f64, height: f64, lo: f64, hi: f64, k: usize) {
    let y = |v: f64| top + height - (v - lo) / (hi - lo) * height;
    let mut points = String::new();
    let mut column = usize::MAX;
    let mut bucket: Option<(usize, f64, usize, f64)> = None;
    let flush = |b: (usize, f64, usize, f64), points: &mut String| {
        let (i_lo, v_lo, i_hi, v_hi) = b;
        let (first, second) = if i_lo <= i_hi {
            ((i_lo, v_lo), (i_hi, v_hi))
        } else {
            ((i_hi, v_hi), (i_lo, v_lo))
        };
        for (i, v) in [first, second] {
            let _ = write!(points, "{:.2},{:.2} ", axis.x(i as f64), y(v));
        }
    };
    for (i, &v) in values.iter().enumerate() {
        let c = axis.column(i);
        if c != column {
            if let Some(b) = bucket.take() {
                flush(b, &mut points);
            }
            column = c;
            bucket = Some((i, v, i, v));
        } else if let Some(b) = bucket.as_mut() {
            if v < b.1 {
                (b.0, b.1) = (i, v);
            }
            if v > b.3 {
                (b.2, b.3) = (i, v);
            }
        }
    }
    if let Some(b) = bucket {
        flush(b, &mut points);
    }
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="{}" stroke-width="1.2" stroke-dasharray="{}" points="{}"/>"#,
        COLORS[k % COLORS.len()],
        DASHES[k % DASHES.len()],
        points.trim_end()
    );
}

fn legend(svg: &mut String, k: usize, name: &str, top: f64) {
    let x = LEFT + 10.0 + 160.0 * k as f64;
    let y = top + 14.0;
    let _ = writeln!(
        svg,
        r#"<line x1="{x:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{}" stroke-width="1.5" stroke-dasharray="{}"/><text x="{:.2}" y="{y:.2}">{}</text>"#,
        y - 4.0,
        x + 24.0,
        y - 4.0,
        COLORS[k % COLORS.len()],
        DASHES[k % DASHES.len()],
        x + 30.0,
        escape(name)
    );
}

fn x_ticks(svg: &mut String, axis: &Axis, bottom: f64) {
    let span = (axis.n.max(2) - 1) as f64;
    let raw = span / 8.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|f| f * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
        .max(1.0);
    let mut t = 0.0;
    while t <= span {
        let x = axis.x(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{bottom:.2}" x2="{x:.2}" y2="{:.2}" stroke="#888"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            bottom + 5.0,
            bottom + 18.0,
            t as u64
        );
        t += step;
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

//! CSV, JSON and SVG emitters. Every file carries the config hash and seed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stamp {
    pub config_hash: String,
    pub seed: u64,
}

/// Prepends `#` comment lines with the stamp to a CSV body.
pub fn stamped_csv(stamp: &Stamp, body: &str) -> String {
    format!(
        "# config_hash={}\n# seed={}\n{body}",
        stamp.config_hash, stamp.seed
    )
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    config_hash: &'a str,
    seed: u64,
    report: &'a T,
}

pub fn stamped_json<T: Serialize>(stamp: &Stamp, report: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Envelope {
        config_hash: &stamp.config_hash,
        seed: stamp.seed,
        report,
    })?;
    s.push('\n');
    Ok(s)
}

/// One line of a plot; `y_err` draws symmetric bars.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64, f64)>,
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// A log-log line plot with error bars. Non-positive values are clipped to
/// the smallest positive value drawn.
pub fn svg_plot(stamp: &Stamp, title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let positive = |v: f64| v > 0.0 && v.is_finite();
    let xs: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).filter(|&v| positive(v)).collect();
    let ys: Vec<f64> = series
        .iter()
        .flat_map(|s| s.points.iter().flat_map(|p| [p.1, p.1 + p.2, p.1 - p.2]))
        .filter(|&v| positive(v))
        .collect();
    let range = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi <= lo {
            (lo.log10() - 0.5, lo.log10() + 0.5)
        } else {
            (lo.log10(), hi.log10())
        }
    };
    let (x0, x1) = range(&xs);
    let (y0, y1) = range(&ys);
    let floor = 10f64.powf(y0);
    let px = |x: f64| PAD + (x.max(10f64.powf(x0)).log10() - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let py = |y: f64| H - PAD - (y.max(floor).log10() - y0) / (y1 - y0) * (H - 2.0 * PAD);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(
        out,
        "<!-- config_hash={} seed={} -->\n<desc>config_hash={} seed={}</desc>",
        stamp.config_hash, stamp.seed, stamp.config_hash, stamp.seed
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    let _ = writeln!(
        out,
        r#"<path d="M{PAD},{PAD} V{b} H{r}" fill="none" stroke="black"/>"#,
        b = H - PAD,
        r = W - PAD
    );
    for e in (x0.floor() as i32)..=(x1.ceil() as i32) {
        let v = 10f64.powi(e);
        if (v.log10() - x0) < -1e-9 || (v.log10() - x1) > 1e-9 {
            continue;
        }
        let x = px(v);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.1}" y1="{b}" x2="{x:.1}" y2="{t}" stroke="black"/><text x="{x:.1}" y="{l}" text-anchor="middle" font-family="sans-serif" font-size="11">1e{e}</text>"#,
            b = H - PAD,
            t = H - PAD + 5.0,
            l = H - PAD + 18.0
        );
    }
    for e in (y0.floor() as i32)..=(y1.ceil() as i32) {
        let v = 10f64.powi(e);
        if (v.log10() - y0) < -1e-9 || (v.log10() - y1) > 1e-9 {
            continue;
        }
        let y = py(v);
        let _ = writeln!(
            out,
            r#"<line x1="{a}" y1="{y:.1}" x2="{PAD}" y2="{y:.1}" stroke="black"/><text x="{l}" y="{t:.1}" text-anchor="end" font-family="sans-serif" font-size="11">1e{e}</text>"#,
            a = PAD - 5.0,
            l = PAD - 8.0,
            t = y + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
        W / 2.0,
        H - 16.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" transform="rotate(-90 16 {})" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
        H / 2.0,
        H / 2.0,
        escape(y_label)
    );
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = s
            .points
            .iter()
            .filter(|p| positive(p.0))
            .enumerate()
            .map(|(k, p)| format!("{}{:.1},{:.1}", if k == 0 { 'M' } else { 'L' }, px(p.0), py(p.1)))
            .collect();
        let _ = writeln!(
            out,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            path.join(" ")
        );
        for p in s.points.iter().filter(|p| positive(p.0)) {
            let (x, lo, hi) = (px(p.0), py(p.1 - p.2), py(p.1 + p.2));
            let _ = writeln!(
                out,
                r#"<line x1="{x:.1}" y1="{lo:.1}" x2="{x:.1}" y2="{hi:.1}" stroke="{color}"/><circle cx="{x:.1}" cy="{:.1}" r="2.5" fill="{color}"/>"#,
                py(p.1)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
            W - PAD - 120.0,
            PAD + 14.0 * i as f64,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes `contents` to `dir/name`, creating `dir`.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

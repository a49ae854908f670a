//! Minimal deterministic SVG line plots with error bars.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use super::SweepRecord;
use crate::percolation::PercolationRecord;

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("nothing to plot")]
    EmptyInput,
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Alpha,
    Core,
    Percolation,
}

impl PlotKind {
    fn labels(self) -> (&'static str, &'static str) {
        match self {
            PlotKind::Alpha => ("mine density", "probability of clearing the board"),
            PlotKind::Core => ("mine density", "mean largest core size"),
            PlotKind::Percolation => ("occupation parameter", "average cluster size"),
        }
    }
}

/// One curve: `(x, y, standard error)` points in x order.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64, f64)>,
}

/// One series per `(policy, n)` for alpha or core size.
pub fn sweep_series(records: &[SweepRecord], kind: PlotKind) -> Vec<Series> {
    let mut out: Vec<Series> = Vec::new();
    for r in records {
        let point = match kind {
            PlotKind::Alpha => Some((r.rho, r.alpha_mean, r.alpha_se)),
            PlotKind::Core => r.maxcore_mean.map(|m| (r.rho, m, r.maxcore_se.unwrap_or(0.0))),
            PlotKind::Percolation => None,
        };
        let Some(point) = point else { continue };
        let label = format!("{} N={}", r.policy, r.n);
        match out.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push(point),
            None => out.push(Series { label, points: vec![point] }),
        }
    }
    for s in &mut out {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    out
}

/// One series per `(mode, n)`.
pub fn percolation_series(records: &[PercolationRecord]) -> Vec<Series> {
    let mut out: Vec<Series> = Vec::new();
    for r in records {
        let label = format!("{} n={}", r.mode, r.n);
        let point = (r.param, r.s_avg_mean, r.s_avg_se);
        match out.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push(point),
            None => out.push(Series { label, points: vec![point] }),
        }
    }
    for s in &mut out {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    out
}

/// Data range widened by 5% on each side; a degenerate range becomes width 1.
pub fn axis_range(values: impl IntoIterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .into_iter()
        .filter(|v| v.is_finite())
        .fold(None, |acc: Option<(f64, f64)>, v| Some(acc.map_or((v, v), |(l, h)| (l.min(v), h.max(v)))))?;
    if hi - lo < 1e-12 {
        return Some((lo - 0.5, hi + 0.5));
    }
    let m = 0.05 * (hi - lo);
    Some((lo - m, hi + m))
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders the series. Numbers are printed with fixed precision so equal
/// inputs give byte-identical output.
pub fn render_svg(series: &[Series], kind: PlotKind) -> Result<String, PlotError> {
    let pts = || series.iter().flat_map(|s| s.points.iter());
    let (x0, x1) = axis_range(pts().map(|p| p.0)).ok_or(PlotError::EmptyInput)?;
    let (y0, y1) = axis_range(pts().flat_map(|p| [p.1 - p.2, p.1 + p.2])).ok_or(PlotError::EmptyInput)?;
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;
    let (xlabel, ylabel) = kind.labels();

    let mut s = String::new();
    let w = &mut s;
    // Writing to a String cannot fail.
    let _ = writeln!(w, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(w, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * i as f64 / 4.0;
        let fy = y0 + (y1 - y0) * i as f64 / 4.0;
        let _ = writeln!(w, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{fx:.3}</text>"#, sx(fx), HEIGHT - BOTTOM + 16.0);
        let _ = writeln!(w, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{fy:.3}</text>"#, LEFT - 6.0, sy(fy) + 4.0);
    }
    let _ = writeln!(w, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{xlabel}</text>"#, LEFT + pw / 2.0, HEIGHT - 10.0);
    let _ = writeln!(
        w,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{ylabel}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = ser.points.iter().map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1))).collect();
        let _ = writeln!(w, r#"<polyline fill="none" stroke="{color}" points="{}"/>"#, path.join(" "));
        for &(x, y, e) in &ser.points {
            let _ = writeln!(
                w,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}"/>"#,
                sx(x),
                sy(y - e),
                sx(x),
                sy(y + e)
            );
            let _ = writeln!(w, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, sx(x), sy(y));
        }
        let ly = TOP + 14.0 + 16.0 * i as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(w, r#"<rect x="{lx:.2}" y="{:.2}" width="10" height="10" fill="{color}"/>"#, ly - 9.0);
        let _ = writeln!(w, r#"<text x="{:.2}" y="{ly:.2}">{}</text>"#, lx + 14.0, escape(&ser.label));
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn render_plots(records: &[SweepRecord], kind: PlotKind, path: &Path) -> Result<(), PlotError> {
    let svg = render_svg(&sweep_series(records, kind), kind)?;
    fs::write(path, svg)?;
    Ok(())
}

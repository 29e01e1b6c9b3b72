//! Standalone SVG 1.1 charts on a fixed 960x540 canvas. Output depends only
//! on the input series; coordinates are printed with two decimals.

use std::fmt::Write as _;
use std::path::Path;

use super::CorpusError;

pub const WIDTH: f64 = 960.0;
pub const HEIGHT: f64 = 540.0;

const LEFT: f64 = 90.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 60.0;
const BOTTOM: f64 = 130.0;

fn plot_w() -> f64 {
    WIDTH - LEFT - RIGHT
}

fn plot_h() -> f64 {
    HEIGHT - TOP - BOTTOM
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn open(out: &mut String, title: &str, x_label: &str, y_label: &str) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="32.00" font-family="sans-serif" font-size="20" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let base = TOP + plot_h();
    let _ = writeln!(out, r#"<line x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{base:.2}" stroke="black"/>"#);
    let _ = writeln!(
        out,
        r#"<line x1="{LEFT:.2}" y1="{base:.2}" x2="{:.2}" y2="{base:.2}" stroke="black"/>"#,
        LEFT + plot_w()
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        LEFT + plot_w() / 2.0,
        HEIGHT - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="24.00" y="{:.2}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 24.00 {:.2})">{}</text>"#,
        TOP + plot_h() / 2.0,
        TOP + plot_h() / 2.0,
        escape(y_label)
    );
}

fn y_ticks(out: &mut String, lo: f64, hi: f64) {
    for i in 0..=4 {
        let v = lo + (hi - lo) * f64::from(i) / 4.0;
        let y = TOP + plot_h() - plot_h() * f64::from(i) / 4.0;
        let _ =
            writeln!(out, r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT:.2}" y2="{y:.2}" stroke="black"/>"#, LEFT - 5.0);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            LEFT - 8.0,
            y + 4.0,
            tick_label(v)
        );
    }
}

fn tick_label(v: f64) -> String {
    if v.abs() >= 1000.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn check_finite<'a>(values: impl IntoIterator<Item = &'a f64>) -> Result<(), CorpusError> {
    if values.into_iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(CorpusError::EmptyInput)
    }
}

/// Bar chart with bar heights proportional to value / max value. Negative
/// values draw as empty bars.
pub fn bar_chart_svg(
    series: &[(String, f64)],
    title: &str,
    x_label: &str,
    y_label: &str,
) -> Result<String, CorpusError> {
    if series.is_empty() {
        return Err(CorpusError::EmptyInput);
    }
    check_finite(series.iter().map(|(_, v)| v))?;
    let max = series.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    let mut out = String::new();
    open(&mut out, title, x_label, y_label);
    y_ticks(&mut out, 0.0, max);

    let slot = plot_w() / series.len() as f64;
    let bar_w = slot * 0.8;
    let base = TOP + plot_h();
    for (i, (label, value)) in series.iter().enumerate() {
        let h = if max > 0.0 { value.max(0.0) / max * plot_h() } else { 0.0 };
        let x = LEFT + slot * i as f64 + (slot - bar_w) / 2.0;
        let _ = writeln!(
            out,
            r##"<rect x="{x:.2}" y="{:.2}" width="{bar_w:.2}" height="{h:.2}" fill="#4a7ab5"><title>{}: {value:.6}</title></rect>"##,
            base - h,
            escape(label)
        );
        let cx = x + bar_w / 2.0;
        let ly = base + 14.0;
        let _ = writeln!(
            out,
            r#"<text x="{cx:.2}" y="{ly:.2}" font-family="sans-serif" font-size="11" text-anchor="end" transform="rotate(-40 {cx:.2} {ly:.2})">{}</text>"#,
            escape(label)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn render_bar_chart(
    series: &[(String, f64)],
    title: &str,
    x_label: &str,
    y_label: &str,
    path: &Path,
) -> Result<(), CorpusError> {
    let svg = bar_chart_svg(series, title, x_label, y_label)?;
    std::fs::write(path, svg).map_err(|e| CorpusError::io(path, e))
}

fn span(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let lo = values.clone().fold(f64::INFINITY, f64::min);
    let hi = values.fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        let pad = (hi - lo) * 0.05;
        (lo - pad, hi + pad)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

/// Scatter plot of `(x, y, label)` points, drawn in input order.
pub fn scatter_svg(
    points: &[(f64, f64, String)],
    title: &str,
    x_label: &str,
    y_label: &str,
) -> Result<String, CorpusError> {
    if points.is_empty() {
        return Err(CorpusError::EmptyInput);
    }
    check_finite(points.iter().flat_map(|(x, y, _)| [x, y]))?;
    let (x_lo, x_hi) = span(points.iter().map(|p| p.0));
    let (y_lo, y_hi) = span(points.iter().map(|p| p.1));
    let mut out = String::new();
    open(&mut out, title, x_label, y_label);
    y_ticks(&mut out, y_lo, y_hi);
    let base = TOP + plot_h();
    for i in 0..=4 {
        let v = x_lo + (x_hi - x_lo) * f64::from(i) / 4.0;
        let x = LEFT + plot_w() * f64::from(i) / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            base + 18.0,
            tick_label(v)
        );
    }
    for (x, y, label) in points {
        let px = LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w();
        let py = base - (y - y_lo) / (y_hi - y_lo) * plot_h();
        let _ = writeln!(
            out,
            r##"<circle cx="{px:.2}" cy="{py:.2}" r="5" fill="#c0504d"><title>{}</title></circle>"##,
            escape(label)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn render_scatter(
    points: &[(f64, f64, String)],
    title: &str,
    x_label: &str,
    y_label: &str,
    path: &Path,
) -> Result<(), CorpusError> {
    let svg = scatter_svg(points, title, x_label, y_label)?;
    std::fs::write(path, svg).map_err(|e| CorpusError::io(path, e))
}

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::table::{CellSummary, Summary};
use crate::inversion::SolverKind;
use crate::{Error, Result};

/// Errors below this are drawn at the floor of the log axis.
const ERROR_FLOOR: f64 = 1e-16;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlotStyle {
    pub width: u32,
    pub height: u32,
    pub stroke_width: f64,
    pub font_size: u32,
}

impl Default for PlotStyle {
    fn default() -> Self {
        Self { width: 640, height: 420, stroke_width: 2.0, font_size: 13 }
    }
}

impl PlotStyle {
    /// TOML unless the extension is `.json`.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Ok(serde_json::from_str(&text)?)
        } else {
            Ok(toml::from_str(&text)?)
        }
    }
}

struct Frame {
    left: f64,
    right: f64,
    top: f64,
    bottom: f64,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn new(style: &PlotStyle, x: (f64, f64), y: (f64, f64)) -> Self {
        let (x_min, x_max) = if x.0 == x.1 { (x.0 - 1.0, x.1 + 1.0) } else { x };
        Self {
            left: 70.0,
            right: style.width as f64 - 150.0,
            top: 40.0,
            bottom: style.height as f64 - 50.0,
            x_min,
            x_max,
            y_min: y.0,
            y_max: y.1,
        }
    }

    fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x_min) / (self.x_max - self.x_min) * (self.right - self.left)
    }

    fn py(&self, y: f64) -> f64 {
        let y = y.clamp(self.y_min, self.y_max);
        self.bottom - (y - self.y_min) / (self.y_max - self.y_min) * (self.bottom - self.top)
    }
}

fn header(svg: &mut String, style: &PlotStyle, title: &str) {
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="{f}">"#,
        w = style.width,
        h = style.height,
        f = style.font_size
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="24" text-anchor="middle">{}</text>"#,
        style.width as f64 / 2.0,
        escape(title)
    );
}

fn axes(svg: &mut String, fr: &Frame, x_label: &str, y_label: &str) {
    let _ = writeln!(
        svg,
        r#"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        fr.left,
        fr.top,
        fr.right - fr.left,
        fr.bottom - fr.top
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (fr.left + fr.right) / 2.0,
        fr.bottom + 38.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
        (fr.top + fr.bottom) / 2.0,
        (fr.top + fr.bottom) / 2.0,
        escape(y_label)
    );
}

fn x_ticks(svg: &mut String, fr: &Frame, ks: &[usize]) {
    for &k in ks {
        let x = fr.px(k as f64);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="black"/>"#,
            fr.bottom,
            fr.bottom + 5.0
        );
        let _ = writeln!(svg, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{k}</text>"#, fr.bottom + 19.0);
    }
}

fn polyline(svg: &mut String, points: &[(f64, f64)], color: &str, width: f64) {
    let pts: Vec<String> = points.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
    let _ = writeln!(
        svg,
        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{width:.1}"/>"#,
        pts.join(" ")
    );
    for (x, y) in points {
        let _ = writeln!(svg, r#"<circle cx="{x:.1}" cy="{y:.1}" r="3" fill="{color}"/>"#);
    }
}

fn legend(svg: &mut String, fr: &Frame, idx: usize, color: &str, label: &str) {
    let y = fr.top + 10.0 + 20.0 * idx as f64;
    let x = fr.right + 12.0;
    let _ = writeln!(
        svg,
        r#"<line x1="{x:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{color}" stroke-width="2"/>"#,
        x + 20.0
    );
    let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, x + 26.0, y + 4.0, escape(label));
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn sigma_label(sigma: f64) -> String {
    if sigma == 0.0 {
        "0".into()
    } else {
        format!("{sigma:e}")
    }
}

fn series(summary: &Summary, solver: SolverKind, sigma: f64) -> Vec<&CellSummary> {
    let mut v: Vec<&CellSummary> = summary.cells.iter().filter(|c| c.solver == solver && c.sigma == sigma).collect();
    v.sort_by_key(|c| c.k);
    v
}

fn k_values(summary: &Summary) -> Vec<usize> {
    let mut ks: Vec<usize> = summary.cells.iter().map(|c| c.k).collect();
    ks.sort();
    ks.dedup();
    ks
}

/// Success rate against `k`, one polyline per (solver, sigma) series.
pub fn render_rate_svg(summary: &Summary, style: &PlotStyle) -> Result<String> {
    if summary.is_empty() {
        return Err(Error::InvalidArgument("empty summary".into()));
    }
    let ks = k_values(summary);
    let fr = Frame::new(style, (ks[0] as f64, ks[ks.len() - 1] as f64), (0.0, 1.0));
    let n = summary.cells[0].n;
    let mut svg = String::new();
    header(&mut svg, style, &format!("Recovery rate, n = {n}"));
    axes(&mut svg, &fr, "k", "rate");
    x_ticks(&mut svg, &fr, &ks);
    for i in 0..=4 {
        let v = i as f64 / 4.0;
        let y = fr.py(v);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="black"/>"#,
            fr.left - 5.0,
            fr.left
        );
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.2}</text>"#, fr.left - 8.0, y + 4.0);
    }
    let sigmas = summary.sigmas();
    let mut idx = 0;
    for solver in summary.solvers() {
        for &sigma in &sigmas {
            let cells = series(summary, solver, sigma);
            if cells.is_empty() {
                continue;
            }
            let color = PALETTE[idx % PALETTE.len()];
            let pts: Vec<(f64, f64)> = cells.iter().map(|c| (fr.px(c.k as f64), fr.py(c.success_rate))).collect();
            polyline(&mut svg, &pts, color, style.stroke_width);
            let label =
                if sigmas.len() > 1 { format!("{solver} s={}", sigma_label(sigma)) } else { solver.to_string() };
            legend(&mut svg, &fr, idx, color, &label);
            idx += 1;
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Log-scale relative error against `k` at one noise level: median
/// polyline per solver over a shaded interquartile band.
pub fn render_error_svg(summary: &Summary, sigma: f64, style: &PlotStyle) -> Result<String> {
    let cells: Vec<&CellSummary> = summary.cells.iter().filter(|c| c.sigma == sigma).collect();
    if cells.is_empty() {
        return Err(Error::InvalidArgument(format!("no cells at sigma = {sigma}")));
    }
    let ks = k_values(summary);
    let finite = cells.iter().flat_map(|c| [c.q1, c.median, c.q3]).filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        let v = v.max(ERROR_FLOOR);
        (lo.min(v), hi.max(v))
    });
    let (lo, hi) = if lo.is_finite() {
        (lo.log10().floor(), hi.log10().ceil().max(lo.log10().floor() + 1.0))
    } else {
        (-16.0, 0.0)
    };
    let fr = Frame::new(style, (ks[0] as f64, ks[ks.len() - 1] as f64), (lo, hi));
    let log = |v: f64| if v.is_finite() { v.max(ERROR_FLOOR).log10() } else { hi };
    let mut svg = String::new();
    header(&mut svg, style, &format!("Relative error, n = {}, sigma = {}", cells[0].n, sigma_label(sigma)));
    axes(&mut svg, &fr, "k", "relative error");
    x_ticks(&mut svg, &fr, &ks);
    let step = ((hi - lo) / 8.0).ceil().max(1.0) as i64;
    let mut e = lo as i64;
    while e as f64 <= hi {
        let y = fr.py(e as f64);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="black"/>"#,
            fr.left - 5.0,
            fr.left
        );
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">1e{e}</text>"#, fr.left - 8.0, y + 4.0);
        e += step;
    }
    for (idx, solver) in summary.solvers().into_iter().enumerate() {
        let s = series(summary, solver, sigma);
        if s.is_empty() {
            continue;
        }
        let color = PALETTE[idx % PALETTE.len()];
        let upper = s.iter().map(|c| (fr.px(c.k as f64), fr.py(log(c.q3))));
        let lower = s.iter().rev().map(|c| (fr.px(c.k as f64), fr.py(log(c.q1))));
        let band: Vec<String> = upper.chain(lower).map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
        let _ =
            writeln!(svg, r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#, band.join(" "));
        let pts: Vec<(f64, f64)> = s.iter().map(|c| (fr.px(c.k as f64), fr.py(log(c.median)))).collect();
        polyline(&mut svg, &pts, color, style.stroke_width);
        legend(&mut svg, &fr, idx, color, solver.name());
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Writes `rate.svg` and one `error_<i>.svg` panel per noise level, in
/// ascending sigma order.
pub fn emit_plots(summary: &Summary, style: &PlotStyle, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let rate = render_rate_svg(summary, style)?;
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let path = out_dir.join("rate.svg");
    std::fs::write(&path, rate)?;
    written.push(path);
    for (i, sigma) in summary.sigmas().into_iter().enumerate() {
        let path = out_dir.join(format!("error_{i}.svg"));
        std::fs::write(&path, render_error_svg(summary, sigma, style)?)?;
        written.push(path);
    }
    Ok(written)
}

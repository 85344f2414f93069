//! Deterministic artifact writers: RFC-4180-style CSV with `#` comment
//! headers, minimal polyline SVG plots, and PGM heatmaps. All numeric
//! formatting is fixed (17 significant digits for data) so identical
//! configurations produce byte-identical files.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

/// 17 significant digits: enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// One CSV cell.
#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_f64(*v),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Expand a complex value into its conventional re/im cell pair.
pub fn complex_cells(z: Complex64) -> [Cell; 2] {
    [Cell::Float(z.re), Cell::Float(z.im)]
}

/// Write a CSV file: `#`-prefixed comment lines (the resolved config), a
/// header row, then data rows.
pub fn write_csv(
    path: &Path,
    comments: &[String],
    header: &[&str],
    rows: &[Vec<Cell>],
) -> std::io::Result<()> {
    let mut buf = String::new();
    for line in comments {
        buf.push_str("# ");
        buf.push_str(line);
        buf.push('\n');
    }
    buf.push_str(&header.join(","));
    buf.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let rendered: Vec<String> = row.iter().map(Cell::render).collect();
        buf.push_str(&rendered.join(","));
        buf.push('\n');
    }
    atomic_write(path, buf.as_bytes())
}

/// One labelled curve for [`write_svg_lines`].
pub struct SvgSeries<'a> {
    pub label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

const SVG_W: f64 = 900.0;
const SVG_H: f64 = 560.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        if s.is_empty() || s == "-" {
            "0".to_string()
        } else {
            s
        }
    } else {
        format!("{v:.3e}")
    }
}

/// Minimal line plot: polylines plus axis ticks, no external dependencies.
pub fn write_svg_lines(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[SvgSeries<'_>],
) -> std::io::Result<()> {
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        for &v in s.x {
            x_min = x_min.min(v);
            x_max = x_max.max(v);
        }
        for &v in s.y {
            if v.is_finite() {
                y_min = y_min.min(v);
                y_max = y_max.max(v);
            }
        }
    }
    if !(x_max > x_min) {
        x_max = x_min + 1.0;
    }
    if !(y_max > y_min) {
        y_max = y_min + 1.0;
    }
    let pad = 0.04 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;
    let to_px = |x: f64, y: f64| {
        let px = MARGIN_L + (x - x_min) / (x_max - x_min) * (SVG_W - MARGIN_L - MARGIN_R);
        let py = SVG_H - MARGIN_B - (y - y_min) / (y_max - y_min) * (SVG_H - MARGIN_T - MARGIN_B);
        (px, py)
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" \
         viewBox=\"0 0 {SVG_W} {SVG_H}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"20\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
        (MARGIN_L + SVG_W - MARGIN_R) / 2.0,
        title
    ));
    // axes
    let (x0, y0) = (MARGIN_L, SVG_H - MARGIN_B);
    svg.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{:.1}\" y2=\"{y0}\" stroke=\"black\"/>\n",
        SVG_W - MARGIN_R
    ));
    svg.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{MARGIN_T}\" stroke=\"black\"/>\n"
    ));
    for i in 0..=5 {
        let fx = x_min + (x_max - x_min) * i as f64 / 5.0;
        let (px, _) = to_px(fx, y_min);
        svg.push_str(&format!(
            "<line x1=\"{px:.1}\" y1=\"{y0}\" x2=\"{px:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
            y0 + 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{px:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            y0 + 18.0,
            fmt_tick(fx)
        ));
        let fy = y_min + (y_max - y_min) * i as f64 / 5.0;
        let (_, py) = to_px(x_min, fy);
        svg.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{py:.1}\" x2=\"{x0}\" y2=\"{py:.1}\" stroke=\"black\"/>\n",
            x0 - 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
            x0 - 8.0,
            py + 4.0,
            fmt_tick(fy)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
        (MARGIN_L + SVG_W - MARGIN_R) / 2.0,
        SVG_H - 12.0,
        x_label
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {:.1})\">{}</text>\n",
        (MARGIN_T + SVG_H - MARGIN_B) / 2.0,
        (MARGIN_T + SVG_H - MARGIN_B) / 2.0,
        y_label
    ));
    for (si, s) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let mut points = String::new();
        for (&x, &y) in s.x.iter().zip(s.y) {
            if !y.is_finite() {
                continue;
            }
            let (px, py) = to_px(x, y);
            points.push_str(&format!("{px:.2},{py:.2} "));
        }
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.3\" points=\"{}\"/>\n",
            points.trim_end()
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
            SVG_W - MARGIN_R - 150.0,
            MARGIN_T + 16.0 * (si as f64 + 1.0),
            s.label
        ));
    }
    svg.push_str("</svg>\n");
    atomic_write(path, svg.as_bytes())
}

/// Grayscale P2 PGM heatmap of values in [0, 1], row-major, 16-bit depth.
pub fn write_pgm(path: &Path, width: usize, height: usize, values: &[f64]) -> std::io::Result<()> {
    assert_eq!(values.len(), width * height);
    let mut buf = String::with_capacity(values.len() * 6 + 32);
    buf.push_str(&format!("P2\n{width} {height}\n65535\n"));
    for row in values.chunks(width) {
        let rendered: Vec<String> = row
            .iter()
            .map(|&v| {
                let clamped = v.clamp(0.0, 1.0);
                ((clamped * 65535.0).round() as u32).to_string()
            })
            .collect();
        buf.push_str(&rendered.join(" "));
        buf.push('\n');
    }
    atomic_write(path, buf.as_bytes())
}

fn atomic_write(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut f = fs::File::create(path)?;
    f.write_all(bytes)?;
    f.flush()
}

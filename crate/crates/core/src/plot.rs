//! Static SVG line charts of sweep CSVs (log-scale y axis).

use std::fmt::Write as _;
use std::io::Read;

use crate::error::{Error, Result};
use crate::sweep::CSV_HEADER;

/// Values at or below zero are drawn at this level.
pub const PLOT_FLOOR: f64 = 1e-12;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 70.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlotPoint {
    pub axis: f64,
    pub bound: f64,
    pub exact: f64,
}

/// Parses a sweep CSV. Row numbers in errors count the header as row 1.
pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<PlotPoint>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rdr.headers().map_err(|e| Error::Parse { row: 1, message: e.to_string() })?.clone();
    if header.is_empty() {
        return Err(Error::Parse { row: 1, message: "empty CSV".into() });
    }
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::Parse { row: 1, message: format!("expected header {}", CSV_HEADER.join(",")) });
    }
    let mut points = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Parse { row, message: e.to_string() })?;
        let field = |j: usize| -> Result<f64> {
            let s = rec.get(j).ok_or_else(|| Error::Parse { row, message: format!("missing column {}", CSV_HEADER[j]) })?;
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse { row, message: format!("column {}: {e}", CSV_HEADER[j]) })
        };
        points.push(PlotPoint { axis: field(0)?, bound: field(1)?, exact: field(2)? });
    }
    if points.is_empty() {
        return Err(Error::Parse { row: 2, message: "CSV has no data rows".into() });
    }
    Ok(points)
}

fn num(x: f64) -> String {
    let s = format!("{x:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Renders bound and exact series as two polylines. Output depends only on the input.
pub fn render_svg(points: &[PlotPoint], axis_label: &str) -> Result<String> {
    if points.is_empty() {
        return Err(Error::Parse { row: 2, message: "nothing to plot".into() });
    }
    let clamp = |v: f64| if v > PLOT_FLOOR { v } else { PLOT_FLOOR };
    let clamped = points.iter().any(|p| p.bound <= PLOT_FLOOR || p.exact <= PLOT_FLOOR);
    let logs: Vec<f64> = points.iter().flat_map(|p| [clamp(p.bound).log10(), clamp(p.exact).log10()]).collect();
    let lo = logs.iter().copied().fold(f64::INFINITY, f64::min).floor();
    let mut hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max).ceil();
    if hi <= lo {
        hi = lo + 1.0;
    }
    let xmin = points.iter().map(|p| p.axis).fold(f64::INFINITY, f64::min);
    let xmax = points.iter().map(|p| p.axis).fold(f64::NEG_INFINITY, f64::max);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| if xmax > xmin { LEFT + (x - xmin) / (xmax - xmin) * plot_w } else { LEFT + plot_w / 2.0 };
    let sy = |v: f64| TOP + (hi - clamp(v).log10()) / (hi - lo) * plot_h;

    let mut svg = String::new();
    let w = &mut svg;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}" font-family="sans-serif" font-size="12">"#,
        WIDTH, HEIGHT, WIDTH, HEIGHT
    );
    let _ = writeln!(w, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        num(plot_w),
        num(plot_h)
    );
    let decades = (hi - lo) as i32;
    let step = (decades / 8).max(1);
    let mut d = lo as i32;
    while d <= hi as i32 {
        let y = TOP + (hi - d as f64) / (hi - lo) * plot_h;
        let _ = writeln!(
            w,
            r##"<line x1="{LEFT}" y1="{y}" x2="{}" y2="{y}" stroke="#dddddd"/><text x="{}" y="{}" text-anchor="end">1e{d}</text>"##,
            num(LEFT + plot_w),
            num(LEFT - 6.0),
            num(y + 4.0),
            y = num(y)
        );
        d += step;
    }
    for p in points {
        let x = sx(p.axis);
        let _ = writeln!(
            w,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            num(x),
            num(TOP + plot_h + 16.0),
            crate::sweep::fmt_sig(p.axis)
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        num(LEFT + plot_w / 2.0),
        num(TOP + plot_h + 34.0),
        escape(axis_label)
    );
    for (name, color, pick) in [
        ("bound", "#1f77b4", (|p: &PlotPoint| p.bound) as fn(&PlotPoint) -> f64),
        ("exact", "#d62728", |p: &PlotPoint| p.exact),
    ] {
        let coords: Vec<String> = points.iter().map(|p| format!("{},{}", num(sx(p.axis)), num(sy(pick(p))))).collect();
        let _ = writeln!(
            w,
            r#"<polyline class="{name}" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            coords.join(" ")
        );
    }
    let _ = writeln!(
        w,
        r##"<text x="{}" y="{}" fill="#1f77b4">bound</text><text x="{}" y="{}" fill="#d62728">exact</text>"##,
        num(LEFT + 10.0),
        num(TOP + 16.0),
        num(LEFT + 60.0),
        num(TOP + 16.0)
    );
    if clamped {
        let _ = writeln!(
            w,
            r#"<text class="footnote" x="{LEFT}" y="{}" font-size="10">values at or below 1e-12 are drawn at the 1e-12 floor</text>"#,
            num(HEIGHT - 10.0)
        );
    }
    let _ = writeln!(w, "</svg>");
    Ok(svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    const CSV: &str = "axis,bound,exact,margin\n1,0.64,0.531,0.109\n2,0.4096,0.3199,0.0897\n3,0.262144,0.18,0.08\n";

    #[test]
    fn renders_two_polylines() {
        let pts = read_sweep_csv(CSV.as_bytes()).unwrap();
        assert_eq!(pts.len(), 3);
        let svg = render_svg(&pts, "n").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(!svg.contains("footnote"));
        assert_eq!(svg, render_svg(&pts, "n").unwrap());
    }

    #[test]
    fn zero_values_are_floored_with_footnote() {
        let pts = read_sweep_csv("axis,bound,exact,margin\n0.5,0,0,0\n0.4,0.1,0.01,0.09\n".as_bytes()).unwrap();
        let svg = render_svg(&pts, "q").unwrap();
        assert!(svg.contains("footnote"));
        assert!(svg.contains("1e-12"));
    }

    #[test]
    fn parse_errors_carry_row_numbers() {
        assert!(read_sweep_csv("".as_bytes()).is_err());
        assert!(matches!(read_sweep_csv("axis,bound,exact,margin\n".as_bytes()), Err(Error::Parse { .. })));
        let err = read_sweep_csv("axis,bound,exact,margin\n1,0.5,0.1,0.4\n2,x,0.1,0.4\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 3, .. }), "{err:?}");
        assert!(read_sweep_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use super::stats::{AggregateCurve, CurvePoint};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "series,time_ms,median_r,ci_low,ci_high";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Svg,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "svg" => Ok(ReportFormat::Svg),
            _ => Err(Error::InvalidArgument(format!("unknown report format '{s}'"))),
        }
    }
}

pub fn emit_report(curves: &[AggregateCurve], format: ReportFormat, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    match format {
        ReportFormat::Csv => write_csv(curves, &mut out)?,
        ReportFormat::Svg => write_svg(curves, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

/// Float text is the shortest representation that parses back to the same
/// value.
pub fn write_csv<W: Write>(curves: &[AggregateCurve], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for c in curves {
        if c.label.contains([',', '\n', '"']) {
            return Err(Error::InvalidArgument(format!("series label {:?} cannot be written to CSV", c.label)));
        }
        for p in &c.points {
            writeln!(out, "{},{:?},{:?},{:?},{:?}", c.label, p.time_ms, p.median_r, p.ci_low, p.ci_high)?;
        }
    }
    Ok(())
}

/// Series in order of first appearance.
pub fn read_csv<R: BufRead>(input: R) -> Result<Vec<AggregateCurve>> {
    let mut curves: Vec<AggregateCurve> = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let no = i + 1;
        if no == 1 {
            if line.trim() != CSV_HEADER {
                return Err(Error::Parse { line: 1, msg: format!("expected header '{CSV_HEADER}'") });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(Error::Parse { line: no, msg: "expected 5 fields".into() });
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse { line: no, msg: format!("bad number '{s}'") });
        let p = CurvePoint { time_ms: num(f[1])?, median_r: num(f[2])?, ci_low: num(f[3])?, ci_high: num(f[4])? };
        match curves.iter_mut().find(|c| c.label == f[0]) {
            Some(c) => c.points.push(p),
            None => curves.push(AggregateCurve { label: f[0].to_string(), points: vec![p] }),
        }
    }
    Ok(curves)
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];
const W: f64 = 720.0;
const H: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Log-log burn-down plot: one polyline per series (straight segments in
/// log space) over a shaded confidence band. Points at nonpositive time are
/// omitted and errors at or below zero are drawn on the bottom axis.
pub fn write_svg<W: Write>(curves: &[AggregateCurve], mut out: W) -> Result<()> {
    let pts = || curves.iter().flat_map(|c| c.points.iter()).filter(|p| p.time_ms > 0.0);
    let (mut x0, mut x1) = pts().fold((f64::INFINITY, 0.0f64), |(a, b), p| (a.min(p.time_ms), b.max(p.time_ms)));
    let (mut y0, mut y1) = pts()
        .flat_map(|p| [p.median_r, p.ci_low, p.ci_high])
        .filter(|&r| r > 0.0)
        .fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(r), b.max(r)));
    if !x0.is_finite() {
        (x0, x1) = (1.0, 10.0);
    }
    if !y0.is_finite() {
        (y0, y1) = (1e-3, 1.0);
    }
    let (lx0, lx1) = (x0.log10().floor(), x1.log10().ceil().max(x0.log10().floor() + 1.0));
    let (ly0, ly1) = (y0.log10().floor(), y1.log10().ceil().max(y0.log10().floor() + 1.0));
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let sx = |t: f64| LEFT + (t.log10() - lx0) / (lx1 - lx0) * pw;
    let sy = |r: f64| {
        let l = if r > 0.0 { r.log10().max(ly0) } else { ly0 };
        TOP + (ly1 - l) / (ly1 - ly0) * ph
    };

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#).unwrap();
    writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#).unwrap();
    for d in lx0 as i32..=lx1 as i32 {
        let x = sx(10f64.powi(d));
        writeln!(s, r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/>"##, TOP + ph).unwrap();
        writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{d}</text>"#, TOP + ph + 16.0).unwrap();
    }
    for d in ly0 as i32..=ly1 as i32 {
        let y = sy(10f64.powi(d));
        writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/>"##, LEFT + pw).unwrap();
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"#, LEFT - 6.0, y + 4.0).unwrap();
    }
    writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">time (ms)</text>"#, LEFT + pw / 2.0, H - 10.0)
        .unwrap();
    writeln!(
        s,
        r#"<text transform="translate(16 {:.2}) rotate(-90)" text-anchor="middle">median relative error</text>"#,
        TOP + ph / 2.0
    )
    .unwrap();

    for (i, c) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let ps: Vec<&CurvePoint> = c.points.iter().filter(|p| p.time_ms > 0.0).collect();
        if ps.len() > 1 {
            let band: Vec<String> = ps
                .iter()
                .map(|p| format!("{:.2},{:.2}", sx(p.time_ms), sy(p.ci_high)))
                .chain(ps.iter().rev().map(|p| format!("{:.2},{:.2}", sx(p.time_ms), sy(p.ci_low))))
                .collect();
            writeln!(s, r#"<polygon points="{}" fill="{color}" fill-opacity="0.15" stroke="none"/>"#, band.join(" "))
                .unwrap();
        }
        let line: Vec<String> = ps.iter().map(|p| format!("{:.2},{:.2}", sx(p.time_ms), sy(p.median_r))).collect();
        writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, line.join(" "))
            .unwrap();
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = LEFT + pw + 12.0;
        writeln!(s, r#"<g class="legend"><line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text></g>"#, lx + 20.0, lx + 26.0, ly + 4.0, escape(&c.label)).unwrap();
    }
    s.push_str("</svg>\n");
    out.write_all(s.as_bytes())?;
    Ok(())
}

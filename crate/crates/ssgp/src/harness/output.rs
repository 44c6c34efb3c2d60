//! Byte-stable report artifacts: CSV, text summary and SVG line plots.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::harness::experiment::{CheckRow, ExperimentReport};
use crate::{Error, Result};

/// Stable CSV column order; every pass flag is recomputable from the stored
/// value, target, tolerance and check columns.
pub const CSV_HEADER: &str = "metric,param,value,uncertainty,target,tolerance,check,pass";

fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.17e}")
    } else {
        format!("{v}")
    }
}

pub fn render_csv(report: &ExperimentReport) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.metric,
            r.param.replace(',', ";"),
            fmt_f64(r.value),
            fmt_f64(r.uncertainty),
            fmt_f64(r.target),
            fmt_f64(r.tolerance),
            r.check.name(),
            r.pass
        );
    }
    out
}

fn render_summary(report: &ExperimentReport) -> String {
    let mut out = format!("experiment: {}\n", report.kind.name());
    for line in &report.summary {
        out.push_str(line);
        out.push('\n');
    }
    out
}

/// SVG polyline of `value` against a numeric `param` for one metric, with a
/// horizontal target line. Log2 x-axis; linear y.
fn render_svg(metric: &str, rows: &[&CheckRow]) -> Option<String> {
    let pts: Vec<(f64, f64, f64)> = rows
        .iter()
        .filter_map(|r| {
            r.param
                .parse::<f64>()
                .ok()
                .filter(|p| *p > 0.0)
                .map(|p| (p.log2(), r.value, r.target))
        })
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let (w, h, pad) = (640.0, 400.0, 50.0);
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let mut ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    ys.push(pts[0].2);
    let (xmin, xmax) = (
        xs.iter().cloned().fold(f64::INFINITY, f64::min),
        xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    let (ymin, ymax) = (
        ys.iter().cloned().fold(f64::INFINITY, f64::min),
        ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    let yspan = (ymax - ymin).max(1e-300);
    let xspan = (xmax - xmin).max(1e-300);
    let sx = |x: f64| pad + (x - xmin) / xspan * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - ymin) / yspan * (h - 2.0 * pad);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{metric} vs log2(n)</text>\n",
        w / 2.0
    );
    let ty = sy(pts[0].2);
    let _ = writeln!(
        svg,
        "<line x1=\"{:.2}\" y1=\"{ty:.2}\" x2=\"{:.2}\" y2=\"{ty:.2}\" stroke=\"red\" stroke-dasharray=\"6,4\"/>",
        sx(xmin),
        sx(xmax)
    );
    let path: Vec<String> = pts
        .iter()
        .map(|p| format!("{:.2},{:.2}", sx(p.0), sy(p.1)))
        .collect();
    let _ = writeln!(
        svg,
        "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"{}\"/>",
        path.join(" ")
    );
    for p in &pts {
        let _ = writeln!(
            svg,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"steelblue\"/>",
            sx(p.0),
            sy(p.1)
        );
    }
    for (x, label) in xs.iter().zip(rows.iter().map(|r| r.param.as_str())) {
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"10\">{label}</text>",
            sx(*x),
            h - pad / 2.0
        );
    }
    svg.push_str("</svg>\n");
    Some(svg)
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Write `report.csv`, `summary.txt` and per-metric SVG plots into `dir`.
/// Byte-identical output for identical reports.
pub fn emit_outputs(report: &ExperimentReport, dir: &Path) -> Result<Vec<String>> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        source: e,
    })?;
    let mut written = Vec::new();
    let csv_path = dir.join("report.csv");
    write_file(&csv_path, &render_csv(report))?;
    written.push(csv_path.display().to_string());
    let sum_path = dir.join("summary.txt");
    write_file(&sum_path, &render_summary(report))?;
    written.push(sum_path.display().to_string());

    let mut metrics: Vec<&str> = Vec::new();
    for r in &report.rows {
        if !metrics.contains(&r.metric.as_str()) {
            metrics.push(&r.metric);
        }
    }
    for metric in metrics {
        let rows: Vec<&CheckRow> = report.rows.iter().filter(|r| r.metric == metric).collect();
        if let Some(svg) = render_svg(metric, &rows) {
            let path = dir.join(format!("{metric}.svg"));
            write_file(&path, &svg)?;
            written.push(path.display().to_string());
        }
    }
    Ok(written)
}

//! Output files: CSV tables, SVG plots and the run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::CliError;

/// Shortest representation that round-trips, so identical runs give identical bytes.
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Rows of a CSV table under a fixed header.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
        w.write_record(&self.header)
            .map_err(|e| io_error(path, e))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| io_error(path, e))?;
        }
        w.flush()
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| io_error(path, e))?;
    std::fs::write(path, text + "\n").map_err(|e| io_error(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub command: String,
    pub timestamp: String,
    pub tool_version: String,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(command: &str, config_hash: String, outputs: Vec<PathBuf>) -> Self {
        Self {
            config_hash,
            command: command.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs,
        }
    }
}

const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 180.0;
const MARGIN: f64 = 30.0;

fn polylines(
    points: &[(f64, f64)],
    break_when: impl Fn(&(f64, f64), &(f64, f64)) -> bool,
) -> String {
    let mut out = String::new();
    let mut seg = String::new();
    let flush = |seg: &mut String, out: &mut String| {
        if !seg.is_empty() {
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="steelblue" stroke-width="1" points="{}"/>"#,
                seg.trim_end()
            );
            seg.clear();
        }
    };
    for (i, p) in points.iter().enumerate() {
        if i > 0 && break_when(&points[i - 1], p) {
            flush(&mut seg, &mut out);
        }
        let _ = write!(seg, "{:.2},{:.2} ", p.0, p.1);
    }
    flush(&mut seg, &mut out);
    out
}

/// Director trace in `(φ, θ)` on an equirectangular chart next to `θ` against time.
pub fn director_svg(samples: &[(f64, f64, f64)]) -> String {
    use std::f64::consts::{PI, TAU};
    let width = 2.0 * PANEL_W + 3.0 * MARGIN;
    let height = PANEL_H + 2.0 * MARGIN;
    let (t0, t1) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (lo.min(s.0), hi.max(s.0))
        });
    let tspan = if t1 > t0 { t1 - t0 } else { 1.0 };
    let sphere: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(_, th, ph)| (MARGIN + PANEL_W * ph / TAU, MARGIN + PANEL_H * th / PI))
        .collect();
    let series: Vec<(f64, f64)> = samples
        .iter()
        .map(|&(t, th, _)| {
            (
                2.0 * MARGIN + PANEL_W * (1.0 + (t - t0) / tspan),
                MARGIN + PANEL_H * th / PI,
            )
        })
        .collect();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">"#
    );
    for x0 in [MARGIN, 2.0 * MARGIN + PANEL_W] {
        let _ = writeln!(
            svg,
            r#"<rect x="{x0}" y="{MARGIN}" width="{PANEL_W}" height="{PANEL_H}" fill="none" stroke="black"/>"#
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="{}">director azimuth φ (0 to 2π) vs polar angle θ (0 to π)</text>"#,
        MARGIN - 8.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}">θ against t</text>"#,
        2.0 * MARGIN + PANEL_W,
        MARGIN - 8.0
    );
    svg += &polylines(&sphere, |a, b| {
        (a.0 - b.0).abs() > PANEL_W / 2.0 || (a.1 - b.1).abs() > PANEL_H / 2.0
    });
    svg += &polylines(&series, |a, b| (a.1 - b.1).abs() > PANEL_H / 2.0);
    svg += "</svg>\n";
    svg
}

/// Creates `dir` and returns `dir/name`.
pub fn output_path(dir: &Path, name: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    Ok(dir.join(name))
}

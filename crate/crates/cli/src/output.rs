//! Accumulated command results and their serialization.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// Everything a command produces; files are written once at the end.
#[derive(Debug, Default)]
pub struct Outcome {
    pub summary: serde_json::Value,
    pub files: Vec<(String, Format, String)>,
    pub violations: Vec<String>,
}

impl Outcome {
    pub fn new(summary: impl Serialize) -> Result<Self, CliError> {
        let summary = serde_json::to_value(summary).map_err(|e| CliError::Numerical(format!("summary: {e}")))?;
        Ok(Outcome { summary, files: Vec::new(), violations: Vec::new() })
    }

    pub fn file(&mut self, name: &str, format: Format, body: String) {
        self.files.push((name.to_string(), format, body));
    }

    pub fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.violations.push(what.into());
        }
    }

    /// Write the selected files and return the stdout summary.
    pub fn emit(&mut self, command: &str, dir: &Path, formats: &[Format]) -> Result<String, CliError> {
        let mut summary = serde_json::Map::new();
        summary.insert("command".into(), command.into());
        summary.insert("ok".into(), self.violations.is_empty().into());
        summary.insert("violations".into(), serde_json::to_value(&self.violations).expect("strings serialize"));
        summary.insert("result".into(), self.summary.take());
        let text = serde_json::to_string_pretty(&serde_json::Value::Object(summary)).expect("values serialize");
        if formats.contains(&Format::Json) {
            self.file(&format!("{command}.json"), Format::Json, format!("{text}\n"));
        }
        let selected: Vec<_> = self.files.iter().filter(|(_, f, _)| formats.contains(f)).collect();
        if !selected.is_empty() {
            fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
        }
        for (name, _, body) in selected {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
        }
        Ok(text)
    }
}

/// Build a CSV document in memory.
pub fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Shortest round-trip decimal, empty for non-finite values.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else {
        String::new()
    }
}

/// Value rounded to 9 significant digits.
pub fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".into();
    }
    let r: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    format!("{r}")
}

/// 800×800 SVG with an affine window fitted to the content plus 10% margin.
pub struct Svg {
    polylines: Vec<(Vec<[f64; 2]>, &'static str, bool)>,
    dots: Vec<([f64; 2], &'static str)>,
}

impl Svg {
    pub fn new() -> Self {
        Svg { polylines: Vec::new(), dots: Vec::new() }
    }

    pub fn polyline(&mut self, pts: Vec<[f64; 2]>, color: &'static str, closed: bool) {
        self.polylines.push((pts, color, closed));
    }

    pub fn dot(&mut self, p: [f64; 2], color: &'static str) {
        self.dots.push((p, color));
    }

    pub fn render(&self) -> String {
        const SIZE: f64 = 800.0;
        let all = self.polylines.iter().flat_map(|(p, _, _)| p.iter()).chain(self.dots.iter().map(|(p, _)| p));
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in all.filter(|p| p[0].is_finite() && p[1].is_finite()) {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        if lo[0] > hi[0] {
            (lo, hi) = ([-1.0; 2], [1.0; 2]);
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
        let scale = SIZE / (span * 1.2);
        let cx = (lo[0] + hi[0]) / 2.0;
        let cy = (lo[1] + hi[1]) / 2.0;
        let map = |p: &[f64; 2]| (SIZE / 2.0 + (p[0] - cx) * scale, SIZE / 2.0 - (p[1] - cy) * scale);
        let mut out = String::new();
        writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="800" viewBox="0 0 800 800">"#).unwrap();
        writeln!(out, r#"<rect width="800" height="800" fill="white"/>"#).unwrap();
        for (pts, color, closed) in &self.polylines {
            let coords: Vec<String> = pts
                .iter()
                .filter(|p| p[0].is_finite() && p[1].is_finite())
                .map(|p| {
                    let (x, y) = map(p);
                    format!("{},{}", sig9(x), sig9(y))
                })
                .collect();
            let tag = if *closed { "polygon" } else { "polyline" };
            writeln!(out, r#"<{tag} points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, coords.join(" ")).unwrap();
        }
        for (p, color) in &self.dots {
            let (x, y) = map(p);
            writeln!(out, r#"<circle cx="{}" cy="{}" r="2.5" fill="{color}"/>"#, sig9(x), sig9(y)).unwrap();
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Points of `x²/a + y²/b = 1`.
pub fn ellipse_outline(a: f64, b: f64) -> Vec<[f64; 2]> {
    (0..256)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / 256.0;
            [a.sqrt() * t.cos(), b.sqrt() * t.sin()]
        })
        .collect()
}

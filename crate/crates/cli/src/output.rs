//! Report plumbing: run manifests, output formats and text tables.

use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use clap::ValueEnum;
use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Provenance attached to every JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, config: &impl Serialize) -> Result<Self> {
        Ok(Self {
            command: command.to_string(),
            seed,
            config: serde_json::to_value(config)?,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: timestamp(),
        })
    }
}

/// UTC timestamp, pinned by `SOURCE_DATE_EPOCH` when set.
pub fn timestamp() -> String {
    let now = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| DateTime::<Utc>::from_timestamp(secs, 0))
        .unwrap_or_else(Utc::now);
    now.to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// A finished command result in every output form.
pub struct Rendered {
    /// Base file name for the report files.
    pub name: &'static str,
    pub json: serde_json::Value,
    pub text: String,
    pub csv: String,
    /// Extra files written to the output directory.
    pub artifacts: Vec<(String, String)>,
}

impl Rendered {
    pub fn emit(&self, format: Format, out_dir: Option<&Path>, out: &mut dyn Write) -> Result<()> {
        let json = serde_json::to_string_pretty(&self.json)? + "\n";
        if let Some(dir) = out_dir {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            write(&dir.join(format!("{}.json", self.name)), &json)?;
            write(&dir.join(format!("{}.txt", self.name)), &self.text)?;
            write(&dir.join(format!("{}.csv", self.name)), &self.csv)?;
            for (file, body) in &self.artifacts {
                write(&dir.join(file), body)?;
            }
        }
        let body = match format {
            Format::Json => json,
            Format::Csv => self.csv.clone(),
            Format::Text => self.text.clone(),
        };
        out.write_all(body.as_bytes()).map_err(|e| CliError::io("stdout", e))
    }
}

pub fn write(path: &PathBuf, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(|e| CliError::io(path, e))
}

/// Builds a JSON report with the manifest under `"manifest"`.
pub fn with_manifest(manifest: &RunManifest, report: &impl Serialize) -> Result<serde_json::Value> {
    let mut value = serde_json::to_value(report)?;
    if let serde_json::Value::Object(map) = &mut value {
        map.insert("manifest".into(), serde_json::to_value(manifest)?);
    }
    Ok(value)
}

/// Four significant figures; scientific notation outside `[1e-4, 1e6)`.
pub fn sig4(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NA".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.3e}").parse().unwrap_or(x);
    let mag = rounded.abs().log10().floor() as i32;
    if !(-4..6).contains(&mag) {
        return format!("{x:.3e}");
    }
    let decimals = (3 - mag).max(0) as usize;
    format!("{rounded:.decimals$}")
}

/// A level in `(0, 1)` as a percentage without trailing zeros.
pub fn percent(level: f64) -> String {
    let s = format!("{:.2}", 100.0 * level);
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn interval(ci: (f64, f64)) -> String {
    format!("({}, {})", sig4(ci.0), sig4(ci.1))
}

/// Plain aligned table: first column left-aligned, the rest right-aligned.
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self { headers: headers.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let cols = self.headers.len();
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let mut s = String::new();
            for (i, c) in cells.iter().enumerate().take(cols) {
                if i > 0 {
                    s.push_str("  ");
                }
                if i == 0 {
                    s.push_str(&format!("{c:<w$}", w = widths[i]));
                } else {
                    s.push_str(&format!("{c:>w$}", w = widths[i]));
                }
            }
            s.trim_end().to_string() + "\n"
        };
        let mut out = line(&self.headers);
        let total: usize = widths.iter().sum::<usize>() + 2 * (cols.saturating_sub(1));
        out.push_str(&"-".repeat(total));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }
}

/// Serializes rows to CSV text.
pub fn csv_string<S: Serialize>(rows: &[S]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

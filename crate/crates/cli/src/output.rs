//! CSV and JSON writers shared by every command.

use std::io::Write;
use std::path::Path;

use bcstab::SuccessProfile;
use serde::{Deserialize, Serialize};

use crate::args::Format;
use crate::spec::RunSpec;
use crate::CliError;

/// Significant digits in CSV cells.
pub const CSV_DIGITS: usize = 9;

/// Round to nine significant digits and print in plain decimal notation,
/// independent of locale.
pub fn sig9(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{:.*e}", CSV_DIGITS - 1, x).parse().unwrap_or(x);
    // shortest round-trip form never needs more digits than were kept
    rounded.to_string()
}

pub fn opt_cell(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), sig9)
}

/// One output table row.
pub trait Row: Serialize {
    fn header() -> &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

/// The JSON document; CSV carries the same content as comment lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<R> {
    pub spec: RunSpec,
    pub profile: SuccessProfile,
    pub rows: Vec<R>,
}

/// A finished table plus free-form metadata for the CSV comments.
pub struct Report<R> {
    pub doc: Document<R>,
    /// `(key, value)` comment lines above the header.
    pub meta: Vec<(String, String)>,
    /// Comment lines after the last row.
    pub summary: Vec<String>,
}

impl<R: Row> Report<R> {
    pub fn new(spec: RunSpec, profile: SuccessProfile, rows: Vec<R>) -> Self {
        Report {
            doc: Document { spec, profile, rows },
            meta: Vec::new(),
            summary: Vec::new(),
        }
    }

    pub fn render(&self) -> Result<Vec<u8>, CliError> {
        match self.doc.spec.output.format {
            Format::Json => {
                let mut buf = serde_json::to_vec_pretty(&self.doc).map_err(internal)?;
                buf.push(b'\n');
                Ok(buf)
            }
            Format::Csv => self.render_csv(),
        }
    }

    fn render_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut buf = Vec::new();
        let spec = serde_json::to_string(&self.doc.spec).map_err(internal)?;
        writeln!(buf, "# spec: {spec}").map_err(internal)?;
        let p = &self.doc.profile;
        let names = SuccessProfile::ENTRY_NAMES;
        let entries: Vec<String> = names
            .iter()
            .zip(p.to_array())
            .map(|(n, v)| format!("{n}={}", sig9(v)))
            .collect();
        writeln!(buf, "# profile: {}", entries.join(" ")).map_err(internal)?;
        for (k, v) in &self.meta {
            writeln!(buf, "# {k}: {v}").map_err(internal)?;
        }
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(R::header()).map_err(internal)?;
            for row in &self.doc.rows {
                w.write_record(row.cells()).map_err(internal)?;
            }
            w.flush().map_err(internal)?;
        }
        for line in &self.summary {
            writeln!(buf, "# {line}").map_err(internal)?;
        }
        Ok(buf)
    }

    /// Write to the spec's output path, or stdout.
    pub fn emit(&self) -> Result<(), CliError> {
        let bytes = self.render()?;
        match &self.doc.spec.output.path {
            Some(path) => write_file(path, &bytes),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(&bytes)
                    .and_then(|_| out.flush())
                    .map_err(|e| CliError::io(Path::new("<stdout>"), e))
            }
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Io {
        path: "<buffer>".into(),
        message: e.to_string(),
    }
}

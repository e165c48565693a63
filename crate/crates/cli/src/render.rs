use std::fs;
use std::io::Write;

use anyhow::Context;
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::OutputArgs;

pub const SCHEMA: &str = "twin-gap/1";

#[derive(Clone, Copy, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str], rows: Vec<Vec<String>>) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        }
    }

    fn to_csv(&self) -> anyhow::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }
}

/// 17 significant digits, '.' decimal separator regardless of locale.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn aligned(columns: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = columns.iter().map(|c| c.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(columns.to_vec());
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

fn json_document(command: &str, report: &impl Serialize) -> anyhow::Result<String> {
    let mut doc = Map::new();
    doc.insert("schema".into(), Value::from(SCHEMA));
    doc.insert("command".into(), Value::from(command));
    match serde_json::to_value(report)? {
        Value::Object(fields) => doc.extend(fields),
        other => {
            doc.insert("result".into(), other);
        }
    }
    Ok(serde_json::to_string_pretty(&Value::Object(doc))? + "\n")
}

/// Writes exactly one document to `--out` or standard output.
pub fn emit<R: Serialize>(
    output: &OutputArgs,
    command: &str,
    report: &R,
    table: impl FnOnce() -> Table,
    text: impl FnOnce() -> String,
) -> anyhow::Result<()> {
    let body = match output.format() {
        Format::Json => json_document(command, report)?,
        Format::Csv => table().to_csv()?,
        Format::Text => text(),
    };
    match &output.out {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

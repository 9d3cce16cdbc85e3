// SPDX-License-Identifier: Apache-2.0

//! Report emission as JSON, CSV or an aligned text table.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use toricorr::analysis::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

pub fn render<R: Serialize>(report: &Report<R>, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report)?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => csv_table(&report.rows),
        Format::Pretty => pretty_table(&report.rows),
    }
}

/// Header plus one record per row; empty when there are no rows.
pub fn csv_table<R: Serialize>(rows: &[R]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let (header, records) = flatten(rows)?;
    if !header.is_empty() {
        w.write_record(&header)?;
    }
    for r in records {
        w.write_record(&r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten<R: Serialize>(rows: &[R]) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut header = Vec::new();
    let mut records = Vec::new();
    for row in rows {
        let Value::Object(map) = serde_json::to_value(row)? else {
            anyhow::bail!("report rows must serialize to objects");
        };
        if header.is_empty() {
            header = map.keys().cloned().collect();
        }
        records.push(header.iter().map(|k| map.get(k).map(cell).unwrap_or_default()).collect());
    }
    Ok((header, records))
}

pub fn pretty_table<R: Serialize>(rows: &[R]) -> Result<String> {
    let (header, records) = flatten(rows)?;
    if header.is_empty() {
        return Ok("(no rows)\n".into());
    }
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in &records {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(&header);
    for r in &records {
        out.push_str(&line(r));
    }
    Ok(out)
}

pub fn write_out(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

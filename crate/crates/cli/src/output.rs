use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use voltype_core::format::sig17;

use crate::Failure;

/// A long-format CSV table, cells already formatted.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

pub fn f(v: f64) -> String {
    sig17(v)
}

pub fn i(v: impl ToString) -> String {
    v.to_string()
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            File::create(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn write_csv(table: &Table, path: Option<&Path>, header: bool) -> Result<(), Failure> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(sink(path)?);
    if header {
        w.write_record(&table.header)?;
    }
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush().map_err(|e| Failure::Usage(e.to_string()))
}

pub fn write_json(value: &Value, path: Option<&Path>) -> Result<(), Failure> {
    let mut w = sink(path)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Internal(e.to_string()))?;
    writeln!(w, "{text}").map_err(|e| Failure::Usage(e.to_string()))?;
    w.flush().map_err(|e| Failure::Usage(e.to_string()))
}

/// Report envelope shared by every command: what ran, with which library and inputs.
pub fn envelope(command: &str, seed: Option<u64>, config: &impl Serialize, result: Value) -> Value {
    json!({
        "command": command,
        "version": voltype_core::VERSION,
        "seed": seed,
        "config": config,
        "result": result,
    })
}

/// Where the JSON summary of a CSV-producing command goes: `summary` if set, else
/// next to `out` with a `.json` extension, else stderr.
pub fn summary_path(summary: Option<&Path>, out: Option<&Path>) -> Option<PathBuf> {
    summary
        .map(Path::to_path_buf)
        .or_else(|| out.map(|o| o.with_extension("json")))
}

pub fn emit(
    table: &Table,
    summary: &Value,
    out: Option<&Path>,
    summary_to: Option<&Path>,
) -> Result<(), Failure> {
    write_csv(table, out, true)?;
    match summary_path(summary_to, out) {
        Some(p) => write_json(summary, Some(&p)),
        None => {
            let text = serde_json::to_string_pretty(summary)
                .map_err(|e| Failure::Internal(e.to_string()))?;
            eprintln!("{text}");
            Ok(())
        }
    }
}

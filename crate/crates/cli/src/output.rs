use std::fs;
use std::io::Write;

use anyhow::{Context, Result};
use avgjohn_core::certify::{Certificate, CSV_HEADER};
use serde::Serialize;
use serde_json::Value;

use crate::args::{Cli, Format};

pub const TOOL: &str = "avgjohn";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything a run produces. No clocks or host details, so identical
/// invocations give identical bytes.
#[derive(Serialize)]
pub struct Report<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub invocation: &'a Cli,
    pub result: Value,
}

/// What a command hands back: a plain result, or certificates that also
/// have a tabular form.
pub enum Outcome {
    Plain(Value),
    Certificates { result: Value, rows: Vec<Certificate> },
}

impl Outcome {
    pub fn plain<T: Serialize>(v: &T) -> Result<Self> {
        Ok(Outcome::Plain(serde_json::to_value(v)?))
    }

    pub fn certificate(c: Certificate) -> Result<Self> {
        Ok(Outcome::Certificates {
            result: serde_json::to_value(&c)?,
            rows: vec![c],
        })
    }
}

pub fn render(cli: &Cli, outcome: Outcome) -> Result<String> {
    let (result, rows) = match outcome {
        Outcome::Plain(v) => (v, None),
        Outcome::Certificates { result, rows } => (result, Some(rows)),
    };
    let report = Report {
        tool: TOOL,
        version: VERSION,
        invocation: cli,
        result,
    };
    match (cli.format, rows) {
        (Format::Json, _) => Ok(serde_json::to_string_pretty(&report)? + "\n"),
        (Format::Csv, Some(rows)) => Ok(certificate_csv(&rows)),
        (Format::Csv, None) => Ok(flat_csv(&serde_json::to_value(&report)?)),
    }
}

pub fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn certificate_csv(rows: &[Certificate]) -> String {
    let mut s = CSV_HEADER.join(",") + "\n";
    for c in rows {
        let row: Vec<String> = c.csv_row().iter().map(|f| csv_field(f)).collect();
        s += &row.join(",");
        s.push('\n');
    }
    s
}

/// `path,value` rows with dotted paths; array entries use their index.
fn flat_csv(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        let join = |key: &str| {
            if prefix.is_empty() {
                key.to_string()
            } else {
                format!("{prefix}.{key}")
            }
        };
        match v {
            Value::Object(map) => map.iter().for_each(|(k, x)| walk(&join(k), x, out)),
            Value::Array(items) => items
                .iter()
                .enumerate()
                .for_each(|(i, x)| walk(&join(&i.to_string()), x, out)),
            Value::String(s) => *out += &format!("{},{}\n", csv_field(prefix), csv_field(s)),
            other => *out += &format!("{},{}\n", csv_field(prefix), other),
        }
    }
    let mut out = String::from("path,value\n");
    walk("", v, &mut out);
    out
}

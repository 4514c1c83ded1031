use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// C's `%.17g`: 17 significant digits, trailing zeros removed, exponent
/// form below 1e-4 or from 1e17 up.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", g17(*v));
            }
            out.push('\n');
        }
        out
    }
}

/// What a subcommand produces.
pub struct Report {
    pub command: &'static str,
    /// Resolved configuration, defaults included.
    pub metadata: Value,
    pub result: Value,
    pub table: Option<Table>,
}

fn envelope(r: &Report, with_result: bool) -> Value {
    let mut v = json!({
        "schema_version": SCHEMA_VERSION,
        "command": r.command,
        "metadata": r.metadata,
    });
    if with_result {
        v["result"] = r.result.clone();
    }
    v
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write output `{}`: {e}", path.display())))
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    path.with_file_name(name)
}

/// Writes the report. CSV goes with a metadata sidecar `<out>.meta.json`,
/// or the metadata on stderr when writing to stdout.
pub fn emit(report: &Report, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let (body, meta) = match (format, &report.table) {
        (Format::Json, _) => (pretty(&envelope(report, true)), None),
        (Format::Csv, Some(t)) => (t.to_csv(), Some(pretty(&envelope(report, false)))),
        (Format::Csv, None) => {
            return Err(CliError::Config(format!(
                "`{}` has no tabular output; use --format json",
                report.command
            )))
        }
    };
    match out {
        Some(path) => {
            write_file(path, &body)?;
            if let Some(m) = meta {
                write_file(&sidecar(path), &m)?;
            }
        }
        None => {
            if let Some(m) = meta {
                eprint!("{m}");
            }
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Config(format!("cannot write to stdout: {e}")))?;
        }
    }
    Ok(())
}

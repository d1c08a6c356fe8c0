use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::Format;
use crate::error::CliError;

/// A rendered report and the process exit code that goes with it.
pub struct Report {
    pub json: String,
    pub table: String,
    pub exit: u8,
}

impl Report {
    pub fn new(value: &impl Serialize, table: String) -> Result<Self, CliError> {
        let json = serde_json::to_string_pretty(value).map_err(|e| CliError::Domain(format!("cannot encode report: {e}")))?;
        Ok(Self { json, table, exit: 0 })
    }

    pub fn with_exit(mut self, code: u8) -> Self {
        self.exit = code;
        self
    }

    pub fn write(&self, format: Format, out: Option<&Path>) -> Result<(), CliError> {
        let mut body = match format {
            Format::Json => self.json.clone(),
            Format::Table => self.table.clone(),
        };
        if !body.ends_with('\n') {
            body.push('\n');
        }
        write_text(&body, out)
    }
}

pub fn write_text(body: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

/// Aligned columns: text left-aligned, everything else right-aligned.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let cols = headers.len();
    let mut width: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let numeric = |c: usize| rows.iter().all(|r| r[c].parse::<f64>().is_ok() || r[c] == "-");
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let parts: Vec<String> = (0..cols)
            .map(|c| {
                if numeric(c) && !rows.is_empty() {
                    format!("{:>w$}", cells[c], w = width[c])
                } else {
                    format!("{:<w$}", cells[c], w = width[c])
                }
            })
            .collect();
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    line(headers.to_vec());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}

/// Two-column key/value table.
pub fn pairs(rows: &[(&str, String)]) -> String {
    let rows: Vec<Vec<String>> = rows.iter().map(|(k, v)| vec![k.to_string(), v.clone()]).collect();
    let width = rows.iter().map(|r| r[0].len()).max().unwrap_or(0);
    rows.iter()
        .map(|r| format!("{:<width$}  {}\n", r[0], r[1]))
        .collect()
}

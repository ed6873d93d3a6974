//! File and console output helpers shared by the subcommands. Everything
//! written here is deterministic: reruns over the same inputs produce
//! byte-identical files.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::CliError;

pub fn io_err(path: &Path, err: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {err}", path.display()))
}

pub fn csv_err(path: &Path, err: csv::Error) -> CliError {
    CliError::Io(format!("{}: {err}", path.display()))
}

/// Creates the output directory if needed and returns the path of one
/// output file inside it.
pub fn prepare(dir: &Path, name: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|err| io_err(dir, err))?;
    Ok(dir.join(name))
}

/// Writes a value as pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|err| CliError::Io(format!("{}: {err}", path.display())))?;
    text.push('\n');
    fs::write(path, text).map_err(|err| io_err(path, err))
}

pub fn jsonl_writer(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(
        File::create(path).map_err(|err| io_err(path, err))?,
    ))
}

pub fn write_jsonl_line<T: Serialize, W: Write>(
    writer: &mut W,
    path: &Path,
    value: &T,
) -> Result<(), CliError> {
    serde_json::to_writer(&mut *writer, value)
        .map_err(|err| CliError::Io(format!("{}: {err}", path.display())))?;
    writer.write_all(b"\n").map_err(|err| io_err(path, err))
}

/// Reads a JSONL file into typed records. Blank lines are skipped; a bad
/// line fails with its 1-based line number.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let file =
        File::open(path).map_err(|err| CliError::Input(format!("cannot open {}: {err}", path.display())))?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|err| CliError::Input(format!("{}: {err}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|err| {
            CliError::Input(format!("{} line {}: {err}", path.display(), idx + 1))
        })?;
        out.push(value);
    }
    Ok(out)
}

/// Full-precision decimal for CSV cells; f64 `Display` round-trips.
pub fn fmt_f64(value: f64) -> String {
    format!("{value}")
}

/// Empty cell for a component excluded under the renormalize policy.
pub fn fmt_opt_f64(value: Option<f64>) -> String {
    value.map(fmt_f64).unwrap_or_default()
}

/// Model ids appear in output file names; anything outside
/// `[A-Za-z0-9._-]` becomes `_`.
pub fn file_stem_for(model_id: &str) -> String {
    model_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub fn csv_writer(path: &Path) -> Result<csv::Writer<File>, CliError> {
    csv::Writer::from_path(path).map_err(|err| csv_err(path, err))
}

pub fn finish_csv(mut writer: csv::Writer<File>, path: &Path) -> Result<(), CliError> {
    writer.flush().map_err(|err| io_err(path, err))
}

/// Left-aligned console table with two spaces between columns.
pub fn print_table(headers: &[&str], rows: &[Vec<String>]) {
    let width = |s: &str| s.chars().count();
    let mut widths: Vec<usize> = headers.iter().map(|h| width(h)).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            if i < widths.len() {
                widths[i] = widths[i].max(width(cell));
            }
        }
    }
    let render = |cells: &[String]| {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate() {
            line.push_str("  ");
            line.push_str(cell);
            if i + 1 < cells.len() {
                for _ in width(cell)..widths[i] {
                    line.push(' ');
                }
            }
        }
        line
    };
    let header_cells: Vec<String> = headers.iter().map(|h| h.to_string()).collect();
    println!("{}", render(&header_cells));
    for row in rows {
        println!("{}", render(row));
    }
}

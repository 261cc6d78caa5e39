//! Tab-separated table helpers shared by the file formats.
//!
//! Lines starting with `#` are comments (the CLI writes provenance there).
//! Cells escape `\t`, `\n`, `\r` and `\\`.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub fn escape(cell: &str) -> String {
    if !cell.contains(['\t', '\n', '\r', '\\']) {
        return cell.to_string();
    }
    let mut out = String::with_capacity(cell.len() + 4);
    for c in cell.chars() {
        match c {
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out
}

pub fn unescape(cell: &str) -> String {
    if !cell.contains('\\') {
        return cell.to_string();
    }
    let mut out = String::with_capacity(cell.len());
    let mut chars = cell.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => out.push(other),
            None => out.push('\\'),
        }
    }
    out
}

pub fn write_row<W: Write, S: AsRef<str>>(w: &mut W, cells: &[S]) -> std::io::Result<()> {
    for (i, cell) in cells.iter().enumerate() {
        if i > 0 {
            w.write_all(b"\t")?;
        }
        w.write_all(escape(cell.as_ref()).as_bytes())?;
    }
    w.write_all(b"\n")
}

/// A parsed table: header plus rows of unescaped cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<(usize, Vec<String>)>,
}

impl Table {
    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidInput(format!("missing column `{name}`")))
    }
}

/// Reads a table whose first non-comment line is the header. Every row must
/// have as many cells as the header.
pub fn read_table<R: BufRead>(reader: R) -> Result<Table> {
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::InvalidInput(format!("line {line_no}: {e}")))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.starts_with('#') || line.is_empty() {
            continue;
        }
        let cells: Vec<String> = line.split('\t').map(unescape).collect();
        match &header {
            None => header = Some(cells),
            Some(h) => {
                if cells.len() != h.len() {
                    return Err(Error::Record {
                        line: line_no,
                        message: format!("expected {} cells, found {}", h.len(), cells.len()),
                    });
                }
                rows.push((line_no, cells));
            }
        }
    }
    let header = header.ok_or_else(|| Error::InvalidInput("missing header".into()))?;
    Ok(Table { header, rows })
}

/// Parses a cell, attaching the line number on failure.
pub fn parse_cell<T: std::str::FromStr>(cell: &str, line: usize, what: &str) -> Result<T> {
    cell.parse().map_err(|_| Error::Record {
        line,
        message: format!("invalid {what} `{cell}`"),
    })
}

use std::io::Read;
use std::path::Path;

use super::{Record, RecordSet};
use crate::error::{Error, Result};

/// Reads an RFC-4180 CSV file with a header row.
///
/// Rows with an empty (or whitespace-only) value in *any* column are dropped,
/// not just rows missing an indexed column. Row numbers in errors are 1-based
/// physical line numbers, the header being line 1.
pub fn load_csv(path: impl AsRef<Path>, text_columns: &[String], id_column: Option<&str>) -> Result<RecordSet> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, text_columns, id_column).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn read_csv<R: Read>(mut reader: R, text_columns: &[String], id_column: Option<&str>) -> Result<RecordSet> {
    if text_columns.is_empty() {
        return Err(Error::InvalidConfig("at least one text column is required".into()));
    }
    for (i, c) in text_columns.iter().enumerate() {
        if text_columns[..i].contains(c) {
            return Err(Error::InvalidConfig(format!("text column `{c}` listed twice")));
        }
    }

    let mut bytes = Vec::new();
    reader
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io("<csv input>", e))?;
    check_quotes(&bytes)?;

    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(bytes.as_slice());
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| csv_error(e, 1))?
        .iter()
        .map(str::to_owned)
        .collect();
    if header.is_empty() || header.iter().all(|h| h.is_empty()) {
        return Err(Error::MalformedCsv {
            row: 1,
            message: "missing header row".into(),
        });
    }

    let position = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_owned()))
    };
    let text_idx = text_columns.iter().map(|c| position(c)).collect::<Result<Vec<_>>>()?;
    let id_idx = id_column.map(position).transpose()?;
    let meta_idx: Vec<usize> = (0..header.len())
        .filter(|i| !text_idx.contains(i) && Some(*i) != id_idx)
        .collect();

    let mut records = Vec::new();
    let mut raw_rows = 0;
    for row in rdr.records() {
        let row = row.map_err(|e| csv_error(e, raw_rows as u64 + 2))?;
        raw_rows += 1;
        if row.iter().any(|v| v.trim().is_empty()) {
            continue;
        }
        records.push(Record {
            row_id: records.len(),
            id: id_idx.map(|i| row[i].to_owned()),
            text: text_idx
                .iter()
                .map(|&i| (header[i].clone(), row[i].to_owned()))
                .collect(),
            metadata: meta_idx
                .iter()
                .map(|&i| (header[i].clone(), row[i].to_owned()))
                .collect(),
        });
    }

    Ok(RecordSet {
        text_columns: text_columns.to_vec(),
        id_column: id_column.map(str::to_owned),
        dropped: raw_rows - records.len(),
        raw_rows,
        records,
    })
}

fn csv_error(err: csv::Error, fallback_row: u64) -> Error {
    let row = err.position().map_or(fallback_row, |p| p.line());
    let message = match err.kind() {
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
            format!("expected {expected_len} fields, found {len}")
        }
        csv::ErrorKind::Utf8 { .. } => "invalid UTF-8".to_owned(),
        _ => err.to_string(),
    };
    Error::MalformedCsv { row, message }
}

/// Rejects input that ends inside a quoted field. The `csv` reader would
/// otherwise accept an unterminated quote on the last row silently.
fn check_quotes(bytes: &[u8]) -> Result<()> {
    let mut line = 1u64;
    let mut quote_line = 0;
    let mut in_quotes = false;
    let mut at_field_start = true;
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if in_quotes {
            match b {
                b'"' if bytes.get(i + 1) == Some(&b'"') => i += 1,
                b'"' => {
                    in_quotes = false;
                    at_field_start = false;
                }
                b'\n' => line += 1,
                _ => {}
            }
        } else {
            match b {
                b'"' if at_field_start => {
                    in_quotes = true;
                    quote_line = line;
                }
                b',' => at_field_start = true,
                b'\n' => {
                    line += 1;
                    at_field_start = true;
                }
                b'\r' => {}
                _ => at_field_start = false,
            }
        }
        i += 1;
    }
    if in_quotes {
        return Err(Error::MalformedCsv {
            row: quote_line,
            message: "unterminated quoted field".into(),
        });
    }
    Ok(())
}

//! Record store: newline-delimited JSON.
//!
//! Line 1 is a header object:
//!
//! ```text
//! {"format":"semsearch-records","version":1,"text_columns":[..],"id_column":null,
//!  "raw_rows":100,"dropped":3,"records":97,"corpus_hash":"<64 hex chars>"}
//! ```
//!
//! followed by one [`Record`] object per line in `row_id` order. The corpus
//! hash is SHA-256 over the JSON-encoded `text_columns` array and every
//! record line, each followed by `\n`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Record, RecordSet};
use crate::error::{Error, Result};

pub const RECORDS_FORMAT: &str = "semsearch-records";
pub const RECORDS_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    text_columns: Vec<String>,
    id_column: Option<String>,
    raw_rows: usize,
    dropped: usize,
    records: usize,
    corpus_hash: String,
}

fn record_line(record: &Record) -> String {
    serde_json::to_string(record).expect("records always serialize")
}

pub(super) fn content_hash(rs: &RecordSet) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(serde_json::to_string(&rs.text_columns).expect("strings serialize"));
    h.update(b"\n");
    for r in &rs.records {
        h.update(record_line(r));
        h.update(b"\n");
    }
    h.finalize().into()
}

/// Writes `records` and returns the corpus hash stored in the header.
pub fn write_records(path: impl AsRef<Path>, records: &RecordSet) -> Result<[u8; 32]> {
    let path = path.as_ref();
    let hash = content_hash(records);
    let header = Header {
        format: RECORDS_FORMAT.into(),
        version: RECORDS_VERSION,
        text_columns: records.text_columns.clone(),
        id_column: records.id_column.clone(),
        raw_rows: records.raw_rows,
        dropped: records.dropped,
        records: records.len(),
        corpus_hash: hex::encode(hash),
    };
    let io = |e| Error::io(path, e);
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    serde_json::to_writer(&mut out, &header).map_err(|e| Error::io(path, e.into()))?;
    out.write_all(b"\n").map_err(io)?;
    for r in &records.records {
        out.write_all(record_line(r).as_bytes()).map_err(io)?;
        out.write_all(b"\n").map_err(io)?;
    }
    out.flush().map_err(io)?;
    Ok(hash)
}

pub fn read_records(path: impl AsRef<Path>) -> Result<RecordSet> {
    const WHAT: &str = "record store";
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();

    let first = match lines.next() {
        Some(line) => line.map_err(|e| Error::io(path, e))?,
        None => return Err(Error::format(WHAT, "empty file")),
    };
    let header: Header = serde_json::from_str(&first).map_err(|e| Error::format(WHAT, format!("bad header: {e}")))?;
    if header.format != RECORDS_FORMAT {
        return Err(Error::format(WHAT, format!("unknown format `{}`", header.format)));
    }
    if header.version != RECORDS_VERSION {
        return Err(Error::UnsupportedVersion {
            what: WHAT,
            found: header.version,
            supported: RECORDS_VERSION,
        });
    }

    let mut records = Vec::with_capacity(header.records);
    for line in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let record: Record =
            serde_json::from_str(&line).map_err(|e| Error::format(WHAT, format!("record {}: {e}", records.len())))?;
        if record.row_id != records.len() {
            return Err(Error::format(
                WHAT,
                format!("expected row_id {}, found {}", records.len(), record.row_id),
            ));
        }
        records.push(record);
    }
    if records.len() < header.records {
        return Err(Error::Truncated(WHAT));
    }
    if records.len() > header.records {
        return Err(Error::format(WHAT, "more records than the header declares"));
    }

    let rs = RecordSet {
        text_columns: header.text_columns,
        id_column: header.id_column,
        records,
        raw_rows: header.raw_rows,
        dropped: header.dropped,
    };
    if hex::encode(content_hash(&rs)) != header.corpus_hash {
        return Err(Error::format(WHAT, "corpus hash does not match contents"));
    }
    Ok(rs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::read_csv;

    fn sample() -> RecordSet {
        let csv = "id,center,state,score\nS1,Alpha School,Delhi,500\nS2,Beta,Goa,\nS3,\"Gamma, North\",Kerala,610\n";
        read_csv(csv.as_bytes(), &["center".into(), "state".into()], Some("id")).unwrap()
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.jsonl");
        let rs = sample();
        let hash = write_records(&path, &rs).unwrap();
        assert_eq!(hash, rs.content_hash());
        assert_eq!(read_records(&path).unwrap(), rs);
    }

    #[test]
    fn truncated_and_tampered_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.jsonl");
        write_records(&path, &sample()).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();

        let first_two: Vec<&str> = text.lines().take(2).collect();
        std::fs::write(&path, first_two.join("\n")).unwrap();
        assert!(matches!(read_records(&path), Err(Error::Truncated(_))));

        std::fs::write(&path, text.replace("Delhi", "Delhj")).unwrap();
        assert!(matches!(read_records(&path), Err(Error::Format { .. })));

        std::fs::write(&path, "").unwrap();
        assert!(matches!(read_records(&path), Err(Error::Format { .. })));

        std::fs::write(&path, text.replacen("\"version\":1", "\"version\":9", 1)).unwrap();
        assert!(matches!(
            read_records(&path),
            Err(Error::UnsupportedVersion { found: 9, .. })
        ));
    }

    #[test]
    fn hash_depends_on_content() {
        let a = sample();
        let mut b = sample();
        b.records[0].text[0].1.push('!');
        assert_ne!(a.content_hash(), b.content_hash());
        assert_eq!(a.content_hash(), sample().content_hash());
    }
}

//! Tabular ingest, tokenization and vocabulary construction.

mod ingest;
mod store;
mod tokenize;
mod vocab;

use serde::{Deserialize, Serialize};

pub use ingest::{load_csv, read_csv};
pub use store::{read_records, write_records, RECORDS_FORMAT, RECORDS_VERSION};
pub use tokenize::tokenize;
pub use vocab::{CellRef, SentenceStream, Vocabulary};

/// One cleaned CSV row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    /// Position after cleaning, contiguous from 0.
    pub row_id: usize,
    /// Value of the id column, when one was configured.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    /// Indexed `(column, text)` cells in the configured column order.
    pub text: Vec<(String, String)>,
    /// Remaining columns in header order.
    pub metadata: Vec<(String, String)>,
}

impl Record {
    pub fn text_of(&self, column: &str) -> Option<&str> {
        self.text.iter().find(|(c, _)| c == column).map(|(_, t)| t.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordSet {
    pub text_columns: Vec<String>,
    pub id_column: Option<String>,
    pub records: Vec<Record>,
    /// Data rows read from the source, before dropping incomplete ones.
    pub raw_rows: usize,
    pub dropped: usize,
}

impl RecordSet {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, row_id: usize) -> Option<&Record> {
        self.records.get(row_id)
    }

    /// Iterates every `(record, text column)` cell in stream order.
    pub fn cells(&self) -> impl Iterator<Item = (CellRef, &str)> + '_ {
        self.records.iter().flat_map(|r| {
            r.text.iter().enumerate().map(move |(column, (_, text))| {
                (
                    CellRef {
                        row_id: r.row_id,
                        column,
                    },
                    text.as_str(),
                )
            })
        })
    }

    /// Tokenized cells, one sentence per cell.
    pub fn token_sentences(&self) -> Vec<Vec<String>> {
        self.cells().map(|(_, text)| tokenize(text)).collect()
    }

    /// SHA-256 over the canonical record-store body; identifies the corpus
    /// in model and index headers.
    pub fn content_hash(&self) -> [u8; 32] {
        store::content_hash(self)
    }
}

/// Maps every cell to in-vocabulary token ids, dropping unknown tokens.
pub fn encode_sentences(records: &RecordSet, vocab: &Vocabulary) -> SentenceStream {
    let mut stream = SentenceStream::default();
    for (cell, text) in records.cells() {
        stream
            .sentences
            .push(tokenize(text).iter().filter_map(|t| vocab.id(t)).collect());
        stream.origins.push(cell);
    }
    stream
}

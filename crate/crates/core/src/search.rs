//! Free text in, ranked records out.
//!
//! Each non-empty text cell becomes one index item whose vector is the mean
//! of its in-vocabulary token embeddings. A query goes through the same
//! embedding, then the forest, and the hits are joined back to records.

use std::path::Path;

use crate::ann::{load_index, AnnIndex, IndexConfig, Neighbor};
use crate::corpus::{read_records, tokenize, CellRef, Record, RecordSet};
use crate::embeddings::{load_model, EmbeddingModel};
use crate::error::{Error, Result};

/// Mean of the embeddings of the in-vocabulary tokens of `text`.
pub fn embed_query(model: &EmbeddingModel, text: &str) -> Result<Vec<f32>> {
    let mut sum = vec![0.0f64; model.dim()];
    let mut used = 0usize;
    let mut dropped = Vec::new();
    for token in tokenize(text) {
        match model.vector(&token) {
            Some(v) => {
                for (s, &x) in sum.iter_mut().zip(v) {
                    *s += x as f64;
                }
                used += 1;
            }
            None => dropped.push(token),
        }
    }
    if used == 0 {
        return Err(Error::UnresolvableQuery { dropped });
    }
    Ok(sum.into_iter().map(|s| (s / used as f64) as f32).collect())
}

/// Vectors for every indexable cell, with the cell each came from. Cells
/// without in-vocabulary tokens, or whose mean vector is zero, are skipped.
pub fn cell_vectors(model: &EmbeddingModel, records: &RecordSet) -> (Vec<Vec<f32>>, Vec<CellRef>) {
    let mut vectors = Vec::new();
    let mut cells = Vec::new();
    for (cell, text) in records.cells() {
        if let Ok(v) = embed_query(model, text) {
            if v.iter().any(|&x| x != 0.0) {
                vectors.push(v);
                cells.push(cell);
            }
        }
    }
    (vectors, cells)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult<'a> {
    /// 1-based.
    pub rank: usize,
    pub item_id: usize,
    pub distance: f32,
    pub row_id: usize,
    pub column: &'a str,
    pub matched_text: &'a str,
    pub record: &'a Record,
}

#[derive(Debug, Clone)]
pub struct SearchEngine {
    model: EmbeddingModel,
    index: AnnIndex,
    records: RecordSet,
    item_map: Vec<CellRef>,
}

impl SearchEngine {
    /// Indexes the cells of `records` and stamps the index with the
    /// corpus hash.
    pub fn build(model: EmbeddingModel, records: RecordSet, config: IndexConfig) -> Result<Self> {
        if config.dim != model.dim() {
            return Err(Error::DimMismatch {
                expected: model.dim(),
                found: config.dim,
            });
        }
        let (vectors, item_map) = cell_vectors(&model, &records);
        let mut index = AnnIndex::build(&vectors, config)?;
        index.corpus_hash = records.content_hash();
        Self::assemble(model, index, records, item_map)
    }

    /// Checks that the three artifacts belong together.
    pub fn new(model: EmbeddingModel, index: AnnIndex, records: RecordSet) -> Result<Self> {
        if model.dim() != index.dim() {
            return Err(Error::DimMismatch {
                expected: model.dim(),
                found: index.dim(),
            });
        }
        let (_, item_map) = cell_vectors(&model, &records);
        Self::assemble(model, index, records, item_map)
    }

    fn assemble(model: EmbeddingModel, index: AnnIndex, records: RecordSet, item_map: Vec<CellRef>) -> Result<Self> {
        let corpus = records.content_hash();
        if model.corpus_hash != corpus {
            return Err(Error::Provenance(format!(
                "model was trained on corpus {}, records are {}",
                hex::encode(model.corpus_hash),
                hex::encode(corpus)
            )));
        }
        if index.corpus_hash != corpus {
            return Err(Error::Provenance(format!(
                "index was built from corpus {}, records are {}",
                hex::encode(index.corpus_hash),
                hex::encode(corpus)
            )));
        }
        if item_map.len() != index.len() {
            return Err(Error::Provenance(format!(
                "index holds {} items but the records yield {} indexable cells",
                index.len(),
                item_map.len()
            )));
        }
        Ok(SearchEngine {
            model,
            index,
            records,
            item_map,
        })
    }

    /// Loads and cross-checks a model, index and record store.
    pub fn open(
        model_path: impl AsRef<Path>,
        index_path: impl AsRef<Path>,
        records_path: impl AsRef<Path>,
    ) -> Result<Self> {
        let model = load_model(model_path)?;
        let index = load_index(index_path)?;
        let records = read_records(records_path)?;
        Self::new(model, index, records)
    }

    pub fn model(&self) -> &EmbeddingModel {
        &self.model
    }

    pub fn index(&self) -> &AnnIndex {
        &self.index
    }

    pub fn records(&self) -> &RecordSet {
        &self.records
    }

    pub fn item_map(&self) -> &[CellRef] {
        &self.item_map
    }

    pub fn embed(&self, text: &str) -> Result<Vec<f32>> {
        embed_query(&self.model, text)
    }

    /// Joins ANN hits to their records, ranking from 1.
    pub fn resolve(&self, hits: &[Neighbor]) -> Vec<SearchResult<'_>> {
        hits.iter()
            .enumerate()
            .map(|(i, n)| {
                let cell = self.item_map[n.item_id];
                let record = &self.records.records[cell.row_id];
                let (column, text) = &record.text[cell.column];
                SearchResult {
                    rank: i + 1,
                    item_id: n.item_id,
                    distance: n.distance,
                    row_id: cell.row_id,
                    column,
                    matched_text: text,
                    record,
                }
            })
            .collect()
    }

    pub fn run_query(&self, text: &str, k: usize, search_k: Option<usize>) -> Result<Vec<SearchResult<'_>>> {
        let q = self.embed(text)?;
        let hits = self.index.query(&q, k, search_k)?;
        Ok(self.resolve(&hits))
    }
}

/// Same as [`SearchEngine::open`].
pub fn build_engine(
    model_path: impl AsRef<Path>,
    index_path: impl AsRef<Path>,
    records_path: impl AsRef<Path>,
) -> Result<SearchEngine> {
    SearchEngine::open(model_path, index_path, records_path)
}

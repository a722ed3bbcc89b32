//! Engine directory: records store, model, index and an optional manifest
//! side by side.
//!
//! Without a manifest the files are looked up under their default names.
//! With one, its file names are used and every recorded dimension and hash is
//! checked against the loaded artifacts.

use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use semsearch::ann::{AnnIndex, INDEX_VERSION};
use semsearch::corpus::{RecordSet, RECORDS_FORMAT, RECORDS_VERSION};
use semsearch::embeddings::{EmbeddingModel, MODEL_VERSION};
use semsearch::search::SearchEngine;
use semsearch::Error;
use serde::{Deserialize, Serialize};

pub const RECORDS_FILE: &str = "records.jsonl";
pub const MODEL_FILE: &str = "model.bin";
pub const INDEX_FILE: &str = "index.ann";
pub const MANIFEST_FILE: &str = "manifest.json";

pub const MANIFEST_FORMAT: &str = "semsearch-engine";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Files {
    pub records: String,
    pub model: String,
    pub index: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainEcho {
    pub dim: usize,
    pub window: usize,
    pub min_count: u64,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f64,
    pub seed: u64,
    pub subsample_t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEcho {
    pub n_trees: usize,
    pub leaf_capacity: usize,
    pub metric: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub format_version: u32,
    pub records_format: String,
    pub records_version: u32,
    pub model_version: u32,
    pub index_version: u32,
    pub files: Files,
    pub corpus_hash: String,
    pub text_columns: Vec<String>,
    pub id_column: Option<String>,
    pub n_records: usize,
    pub dim: usize,
    pub vocab_size: usize,
    pub n_items: usize,
    pub train: TrainEcho,
    pub index: IndexEcho,
}

impl Manifest {
    pub fn describe(files: Files, model: &EmbeddingModel, index: &AnnIndex, records: &RecordSet) -> Self {
        let t = model.config();
        let c = index.config();
        Manifest {
            format: MANIFEST_FORMAT.into(),
            format_version: MANIFEST_VERSION,
            records_format: RECORDS_FORMAT.into(),
            records_version: RECORDS_VERSION,
            model_version: MODEL_VERSION as u32,
            index_version: INDEX_VERSION as u32,
            files,
            corpus_hash: hex::encode(records.content_hash()),
            text_columns: records.text_columns.clone(),
            id_column: records.id_column.clone(),
            n_records: records.len(),
            dim: model.dim(),
            vocab_size: model.vocab().len(),
            n_items: index.len(),
            train: TrainEcho {
                dim: t.dim,
                window: t.window,
                min_count: t.min_count,
                negatives: t.negatives,
                epochs: t.epochs,
                initial_lr: t.initial_lr,
                seed: t.seed,
                subsample_t: t.subsample_t,
            },
            index: IndexEcho {
                n_trees: c.n_trees,
                leaf_capacity: c.leaf_capacity,
                metric: "angular".into(),
                seed: c.seed,
            },
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.into(),
            source: e,
        })?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.into(),
            source: e,
        })?;
        let manifest: Manifest = serde_json::from_str(&text).map_err(|e| Error::Format {
            what: "manifest",
            message: e.to_string(),
        })?;
        if manifest.format != MANIFEST_FORMAT {
            return Err(Error::Format {
                what: "manifest",
                message: format!("unexpected format `{}`", manifest.format),
            }
            .into());
        }
        if manifest.format_version != MANIFEST_VERSION {
            return Err(Error::UnsupportedVersion {
                what: "manifest",
                found: manifest.format_version,
                supported: MANIFEST_VERSION,
            }
            .into());
        }
        Ok(manifest)
    }

    /// Fails with a provenance error naming the first field that disagrees.
    pub fn check(&self, engine: &SearchEngine) -> Result<()> {
        let actual = Manifest::describe(self.files.clone(), engine.model(), engine.index(), engine.records());
        let checks: [(&str, String, String); 6] = [
            ("corpus_hash", self.corpus_hash.clone(), actual.corpus_hash),
            ("dim", self.dim.to_string(), actual.dim.to_string()),
            ("vocab_size", self.vocab_size.to_string(), actual.vocab_size.to_string()),
            ("n_items", self.n_items.to_string(), actual.n_items.to_string()),
            ("n_records", self.n_records.to_string(), actual.n_records.to_string()),
            (
                "text_columns",
                self.text_columns.join(","),
                actual.text_columns.join(","),
            ),
        ];
        for (field, recorded, found) in checks {
            if recorded != found {
                return Err(Error::Provenance(format!(
                    "manifest {field} is {recorded} but the artifacts have {found}"
                ))
                .into());
            }
        }
        Ok(())
    }
}

/// Path of `target` as written into a manifest at `manifest`: relative when
/// both share a directory.
pub fn manifest_name(manifest: &Path, target: &Path) -> String {
    let dir = manifest.parent().unwrap_or(Path::new(""));
    match target.strip_prefix(dir) {
        Ok(rel) if target.parent() == Some(dir) => rel.display().to_string(),
        _ => std::path::absolute(target)
            .unwrap_or_else(|_| target.to_path_buf())
            .display()
            .to_string(),
    }
}

pub struct EngineDir {
    root: PathBuf,
}

impl EngineDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        EngineDir { root: root.into() }
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.root.join(MANIFEST_FILE)
    }

    pub fn open(&self) -> Result<SearchEngine> {
        if !self.root.is_dir() {
            bail!(Error::InvalidConfig(format!(
                "engine directory {} does not exist",
                self.root.display()
            )));
        }
        let manifest_path = self.manifest_path();
        let manifest = if manifest_path.exists() {
            Some(Manifest::load(&manifest_path)?)
        } else {
            None
        };
        let files = manifest.as_ref().map(|m| m.files.clone()).unwrap_or(Files {
            records: RECORDS_FILE.into(),
            model: MODEL_FILE.into(),
            index: INDEX_FILE.into(),
        });
        let engine = SearchEngine::open(
            self.root.join(&files.model),
            self.root.join(&files.index),
            self.root.join(&files.records),
        )?;
        if let Some(m) = &manifest {
            m.check(&engine)?;
        }
        Ok(engine)
    }
}

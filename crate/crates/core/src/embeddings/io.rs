//! Model file, little-endian:
//!
//! | offset | size      | field                                   |
//! |--------|-----------|-----------------------------------------|
//! | 0      | 4         | magic `W2VM`                            |
//! | 4      | 2         | format version (u16, currently 1)       |
//! | 6      | 4         | dim (u32)                               |
//! | 10     | 4         | V, vocabulary size (u32)                |
//! | 14     | 32        | corpus SHA-256                          |
//! | 46     | 4         | window (u32)                            |
//! | 50     | 8         | min_count (u64)                         |
//! | 58     | 4         | negatives (u32)                         |
//! | 62     | 4         | epochs (u32)                            |
//! | 66     | 8         | initial_lr (f64)                        |
//! | 74     | 8         | seed (u64)                              |
//! | 82     | 8         | subsample_t (f64)                       |
//! | 90     | variable  | V × (count u64, byte length u32, UTF-8) |
//! | …      | 4·V·dim   | input matrix, row-major f32             |
//! | …      | 4·V·dim   | output matrix, row-major f32            |

use std::path::Path;

use super::{EmbeddingModel, TrainConfig};
use crate::binio::{check_magic, put_f32s, ByteReader};
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

pub const MODEL_MAGIC: [u8; 4] = *b"W2VM";
pub const MODEL_VERSION: u16 = 1;
const WHAT: &str = "model";

impl EmbeddingModel {
    pub fn to_bytes(&self) -> Vec<u8> {
        let c = &self.config;
        let mut out = Vec::with_capacity(90 + 8 * self.input.len());
        out.extend_from_slice(&MODEL_MAGIC);
        out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
        out.extend_from_slice(&(c.dim as u32).to_le_bytes());
        out.extend_from_slice(&(self.vocab.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.corpus_hash);
        out.extend_from_slice(&(c.window as u32).to_le_bytes());
        out.extend_from_slice(&c.min_count.to_le_bytes());
        out.extend_from_slice(&(c.negatives as u32).to_le_bytes());
        out.extend_from_slice(&(c.epochs as u32).to_le_bytes());
        out.extend_from_slice(&c.initial_lr.to_le_bytes());
        out.extend_from_slice(&c.seed.to_le_bytes());
        out.extend_from_slice(&c.subsample_t.to_le_bytes());
        for (_, token, count) in self.vocab.iter() {
            out.extend_from_slice(&count.to_le_bytes());
            out.extend_from_slice(&(token.len() as u32).to_le_bytes());
            out.extend_from_slice(token.as_bytes());
        }
        put_f32s(&mut out, &self.input);
        put_f32s(&mut out, &self.output);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(bytes, WHAT);
        check_magic(&mut r, MODEL_MAGIC)?;
        let version = r.u16()?;
        if version != MODEL_VERSION {
            return Err(Error::UnsupportedVersion {
                what: WHAT,
                found: version as u32,
                supported: MODEL_VERSION as u32,
            });
        }
        let dim = r.u32()? as usize;
        let v = r.u32()? as usize;
        let corpus_hash = r.array::<32>()?;
        let config = TrainConfig {
            dim,
            window: r.u32()? as usize,
            min_count: r.u64()?,
            negatives: r.u32()? as usize,
            epochs: r.u32()? as usize,
            initial_lr: r.f64()?,
            seed: r.u64()?,
            subsample_t: r.f64()?,
        };
        config.validate().map_err(|e| Error::format(WHAT, e.to_string()))?;
        if v == 0 {
            return Err(Error::format(WHAT, "empty vocabulary"));
        }

        let mut entries = Vec::with_capacity(v.min(r.remaining() / 12));
        for _ in 0..v {
            let count = r.u64()?;
            let len = r.u32()? as usize;
            let token = std::str::from_utf8(r.take(len)?).map_err(|_| Error::format(WHAT, "token is not UTF-8"))?;
            entries.push((token.to_owned(), count));
        }
        let vocab = Vocabulary::from_entries(entries)?;

        let cells = v.checked_mul(dim).ok_or(Error::Truncated(WHAT))?;
        let input = r.f32s(cells)?;
        let output = r.f32s(cells)?;
        r.finish()?;
        Ok(EmbeddingModel::from_parts(vocab, config, input, output, corpus_hash))
    }
}

pub fn save_model(model: &EmbeddingModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, model.to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<EmbeddingModel> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    EmbeddingModel::from_bytes(&bytes)
}

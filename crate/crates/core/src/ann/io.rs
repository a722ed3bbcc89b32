//! Index file, little-endian. Every section starts on a 4-byte boundary so
//! the item matrix and node arrays can be read in place from a mapping.
//!
//! Header (64 bytes):
//!
//! | offset | size | field                                   |
//! |--------|------|-----------------------------------------|
//! | 0      | 4    | magic `ANNF`                            |
//! | 4      | 2    | format version (u16, currently 1)       |
//! | 6      | 4    | dim (u32)                               |
//! | 10     | 4    | N, item count (u32)                     |
//! | 14     | 4    | n_trees (u32)                           |
//! | 18     | 4    | leaf_capacity (u32)                     |
//! | 22     | 1    | metric (u8, 0 = angular)                |
//! | 23     | 1    | reserved, 0                             |
//! | 24     | 8    | build seed (u64)                        |
//! | 32     | 32   | corpus SHA-256                          |
//!
//! Then the item matrix, `N × dim` f32 rows of unit norm, followed by
//! `n_trees` tree sections:
//!
//! | size            | field                                          |
//! |-----------------|------------------------------------------------|
//! | 4               | node count (u32)                               |
//! | 4               | split count (u32)                              |
//! | 4               | leaf item count (u32)                          |
//! | 4               | reserved, 0                                    |
//! | 16 × nodes      | `(kind, a, b, c)` u32 each; node 0 is the root |
//! | 4 × (dim+1) × splits | hyperplane normal then offset, f32        |
//! | 4 × leaf items  | item ids (u32)                                 |
//!
//! Node `kind` 0 is a split with children `a`, `b` and split row `c`;
//! kind 1 is a leaf covering `leaf_items[a..a + b]`. Child indices are
//! always greater than their parent's.

use std::path::Path;

use super::{AnnIndex, FlatNode, IndexConfig, Metric, Tree, LEAF, SPLIT};
use crate::binio::{check_magic, put_f32s, put_u32s, ByteReader};
use crate::error::{Error, Result};

pub const INDEX_MAGIC: [u8; 4] = *b"ANNF";
pub const INDEX_VERSION: u16 = 1;
const WHAT: &str = "index";

impl AnnIndex {
    pub fn to_bytes(&self) -> Vec<u8> {
        let c = &self.config;
        let mut out = Vec::with_capacity(64 + self.items.len() * 4);
        out.extend_from_slice(&INDEX_MAGIC);
        out.extend_from_slice(&INDEX_VERSION.to_le_bytes());
        out.extend_from_slice(&(c.dim as u32).to_le_bytes());
        out.extend_from_slice(&(self.len() as u32).to_le_bytes());
        out.extend_from_slice(&(c.n_trees as u32).to_le_bytes());
        out.extend_from_slice(&(c.leaf_capacity as u32).to_le_bytes());
        out.push(c.metric as u8);
        out.push(0);
        out.extend_from_slice(&c.seed.to_le_bytes());
        out.extend_from_slice(&self.corpus_hash);
        debug_assert_eq!(out.len(), 64);
        put_f32s(&mut out, &self.items);
        for t in &self.trees {
            let n_splits = t.splits.len() / (c.dim + 1);
            put_u32s(
                &mut out,
                &[t.nodes.len() as u32, n_splits as u32, t.leaf_items.len() as u32, 0],
            );
            for n in &t.nodes {
                put_u32s(&mut out, &[n.kind, n.a, n.b, n.c]);
            }
            put_f32s(&mut out, &t.splits);
            put_u32s(&mut out, &t.leaf_items);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(bytes, WHAT);
        check_magic(&mut r, INDEX_MAGIC)?;
        let version = r.u16()?;
        if version != INDEX_VERSION {
            return Err(Error::UnsupportedVersion {
                what: WHAT,
                found: version as u32,
                supported: INDEX_VERSION as u32,
            });
        }
        let dim = r.u32()? as usize;
        let n = r.u32()? as usize;
        let n_trees = r.u32()? as usize;
        let leaf_capacity = r.u32()? as usize;
        let metric = match r.u8()? {
            0 => Metric::Angular,
            m => return Err(Error::format(WHAT, format!("unknown metric {m}"))),
        };
        r.u8()?;
        let seed = r.u64()?;
        let corpus_hash = r.array::<32>()?;
        let config = IndexConfig {
            dim,
            n_trees,
            metric,
            leaf_capacity,
            seed,
        };
        config.validate().map_err(|e| Error::format(WHAT, e.to_string()))?;
        if n == 0 {
            return Err(Error::format(WHAT, "no items"));
        }

        let items = r.f32s(n.checked_mul(dim).ok_or(Error::Truncated(WHAT))?)?;
        if items.iter().any(|x| !x.is_finite()) {
            return Err(Error::format(WHAT, "non-finite item vector"));
        }
        let mut trees = Vec::with_capacity(n_trees.min(r.remaining() / 16));
        for t in 0..n_trees {
            let tree = read_tree(&mut r, dim, n).map_err(|e| match e {
                Error::Format { message, .. } => Error::format(WHAT, format!("tree {t}: {message}")),
                other => other,
            })?;
            trees.push(tree);
        }
        r.finish()?;
        Ok(AnnIndex {
            config,
            items,
            trees,
            corpus_hash,
        })
    }
}

fn read_tree(r: &mut ByteReader<'_>, dim: usize, n: usize) -> Result<Tree> {
    let n_nodes = r.u32()? as usize;
    let n_splits = r.u32()? as usize;
    let n_leaf_items = r.u32()? as usize;
    r.u32()?;
    let raw = r.u32s(n_nodes.checked_mul(4).ok_or(Error::Truncated(WHAT))?)?;
    let nodes: Vec<FlatNode> = raw
        .chunks_exact(4)
        .map(|c| FlatNode {
            kind: c[0],
            a: c[1],
            b: c[2],
            c: c[3],
        })
        .collect();
    let splits = r.f32s(n_splits.checked_mul(dim + 1).ok_or(Error::Truncated(WHAT))?)?;
    let leaf_items = r.u32s(n_leaf_items)?;

    if nodes.is_empty() {
        return Err(Error::format(WHAT, "no nodes"));
    }
    for (i, node) in nodes.iter().enumerate() {
        match node.kind {
            SPLIT => {
                let ok = (node.a as usize) > i
                    && (node.b as usize) > i
                    && (node.a as usize) < nodes.len()
                    && (node.b as usize) < nodes.len()
                    && (node.c as usize) < n_splits;
                if !ok {
                    return Err(Error::format(WHAT, format!("bad split node {i}")));
                }
            }
            LEAF => {
                if node.a as usize + node.b as usize > leaf_items.len() {
                    return Err(Error::format(WHAT, format!("leaf {i} out of bounds")));
                }
            }
            k => return Err(Error::format(WHAT, format!("node {i} has unknown kind {k}"))),
        }
    }
    // Each tree must cover every item exactly once.
    let mut seen = vec![false; n];
    let mut covered = 0;
    for node in nodes.iter().filter(|x| x.kind == LEAF) {
        for &item in &leaf_items[node.a as usize..(node.a + node.b) as usize] {
            match seen.get_mut(item as usize) {
                Some(s) if !*s => {
                    *s = true;
                    covered += 1;
                }
                _ => return Err(Error::format(WHAT, format!("item {item} misplaced"))),
            }
        }
    }
    if covered != n {
        return Err(Error::format(WHAT, "leaves do not cover all items"));
    }
    Ok(Tree {
        nodes,
        splits,
        leaf_items,
    })
}

pub fn save_index(index: &AnnIndex, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, index.to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn load_index(path: impl AsRef<Path>) -> Result<AnnIndex> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    AnnIndex::from_bytes(&bytes)
}

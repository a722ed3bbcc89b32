//! Approximate nearest neighbours over unit vectors: a forest of
//! random-hyperplane binary trees searched with one shared priority queue.
//!
//! Items are normalized on insertion, so the angular distance between two
//! stored vectors is their Euclidean distance. Raw norms are not kept.

mod build;
mod io;
mod query;

pub use io::{load_index, save_index, INDEX_MAGIC, INDEX_VERSION};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Metric {
    Angular = 0,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexConfig {
    pub dim: usize,
    pub n_trees: usize,
    pub metric: Metric,
    pub leaf_capacity: usize,
    pub seed: u64,
}

impl IndexConfig {
    pub const DEFAULT_TREES: usize = 10;
    pub const DEFAULT_LEAF_CAPACITY: usize = 16;

    pub fn new(dim: usize) -> Self {
        IndexConfig {
            dim,
            n_trees: Self::DEFAULT_TREES,
            metric: Metric::Angular,
            leaf_capacity: Self::DEFAULT_LEAF_CAPACITY,
            seed: 42,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_owned()));
        if self.dim == 0 {
            return bad("dim must be at least 1");
        }
        if self.n_trees == 0 {
            return bad("n_trees must be at least 1");
        }
        if self.leaf_capacity < 2 {
            return bad("leaf_capacity must be at least 2");
        }
        if self.dim > u32::MAX as usize || self.n_trees > u32::MAX as usize || self.leaf_capacity > u32::MAX as usize {
            return bad("index parameters must fit in u32");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub item_id: usize,
    /// Angular distance, in `[0, 2]`.
    pub distance: f32,
}

/// Sorts by ascending distance, then ascending id.
pub fn sort_neighbors(neighbors: &mut [Neighbor]) {
    neighbors.sort_unstable_by(|a, b| {
        a.distance
            .total_cmp(&b.distance)
            .then_with(|| a.item_id.cmp(&b.item_id))
    });
}

const SPLIT: u32 = 0;
const LEAF: u32 = 1;

/// Fixed-size node record, identical in memory and on disk.
///
/// Split: `a`/`b` are the left/right child node indices, `c` the split row.
/// Leaf: `a` is the start into the tree's leaf-item array, `b` the count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct FlatNode {
    kind: u32,
    a: u32,
    b: u32,
    c: u32,
}

/// One tree: node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Tree {
    nodes: Vec<FlatNode>,
    /// `dim + 1` floats per split: the hyperplane normal, then the offset.
    splits: Vec<f32>,
    leaf_items: Vec<u32>,
}

/// Borrowed view of a tree node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Node<'a> {
    /// Points with `normal·x + offset <= 0` live under `left`. A zero normal
    /// marks a split that fell back to random routing.
    Split {
        normal: &'a [f32],
        offset: f32,
        left: u32,
        right: u32,
    },
    Leaf {
        items: &'a [u32],
    },
}

impl Tree {
    fn node(&self, idx: u32, dim: usize) -> Node<'_> {
        let n = self.nodes[idx as usize];
        match n.kind {
            SPLIT => {
                let row = &self.splits[n.c as usize * (dim + 1)..][..dim + 1];
                Node::Split {
                    normal: &row[..dim],
                    offset: row[dim],
                    left: n.a,
                    right: n.b,
                }
            }
            _ => Node::Leaf {
                items: &self.leaf_items[n.a as usize..(n.a + n.b) as usize],
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnIndex {
    config: IndexConfig,
    /// `N × dim`, row-major, unit norm.
    items: Vec<f32>,
    trees: Vec<Tree>,
    /// Corpus the items were derived from; zero when unknown.
    pub corpus_hash: [u8; 32],
}

impl AnnIndex {
    pub fn config(&self) -> &IndexConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.config.dim
    }

    pub fn len(&self) -> usize {
        self.items.len() / self.config.dim
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    /// Normalized vector of item `id`.
    pub fn item(&self, id: usize) -> Option<&[f32]> {
        let d = self.dim();
        self.items.get(id * d..(id + 1) * d)
    }

    pub fn items(&self) -> &[f32] {
        &self.items
    }

    pub fn node(&self, tree: usize, node: u32) -> Node<'_> {
        self.trees[tree].node(node, self.dim())
    }

    pub fn node_count(&self, tree: usize) -> usize {
        self.trees[tree].nodes.len()
    }

    /// Leaf item lists of one tree, in node order.
    pub fn leaves(&self, tree: usize) -> Vec<&[u32]> {
        let t = &self.trees[tree];
        (0..t.nodes.len() as u32)
            .filter_map(|i| match t.node(i, self.dim()) {
                Node::Leaf { items } => Some(items),
                Node::Split { .. } => None,
            })
            .collect()
    }
}

/// Hyperplane side test shared by build and query.
#[inline]
pub(crate) fn margin(normal: &[f32], offset: f32, x: &[f32]) -> f64 {
    crate::linalg::dot(normal, x) + offset as f64
}

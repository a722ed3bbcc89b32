use rayon::prelude::*;

use super::{margin, AnnIndex, FlatNode, IndexConfig, Tree, LEAF, SPLIT};
use crate::error::{Error, Result};
use crate::linalg::normalize;
use crate::rng::{self, SeededRng};

/// Re-samples of the two split points before falling back to random routing.
pub const MAX_SPLIT_RETRIES: usize = 3;

impl AnnIndex {
    /// Normalizes `items` and builds `config.n_trees` trees.
    ///
    /// Tree `t` draws from ChaCha8 seeded with `config.seed` on stream
    /// `2^32 + t`, so trees are independent and built in parallel with the
    /// same result as a sequential build.
    pub fn build<V: AsRef<[f32]>>(items: &[V], config: IndexConfig) -> Result<Self> {
        config.validate()?;
        if items.is_empty() {
            return Err(Error::EmptyInput("no items to index"));
        }
        if items.len() > u32::MAX as usize {
            return Err(Error::InvalidConfig("too many items".into()));
        }
        let dim = config.dim;
        let mut flat = Vec::with_capacity(items.len() * dim);
        for (id, v) in items.iter().enumerate() {
            let v = v.as_ref();
            if v.len() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            flat.extend(normalize(v).map_err(|_| Error::ZeroItem(id))?);
        }

        let trees = (0..config.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = rng::seeded(config.seed, rng::streams::TREE_BASE + t as u64);
                build_tree(&flat, dim, config.leaf_capacity, &mut rng)
            })
            .collect();

        Ok(AnnIndex {
            config,
            items: flat,
            trees,
            corpus_hash: [0; 32],
        })
    }
}

fn build_tree(items: &[f32], dim: usize, leaf_capacity: usize, rng: &mut SeededRng) -> Tree {
    let n = items.len() / dim;
    let mut tree = Tree {
        nodes: vec![FlatNode {
            kind: LEAF,
            a: 0,
            b: 0,
            c: 0,
        }],
        splits: Vec::new(),
        leaf_items: Vec::with_capacity(n),
    };
    // Depth-first with an explicit stack; two-point splits can be very
    // unbalanced, so recursion depth is not bounded by log N.
    let mut stack: Vec<(u32, Vec<u32>)> = vec![(0, (0..n as u32).collect())];
    let row = |i: u32| &items[i as usize * dim..][..dim];

    while let Some((node, subset)) = stack.pop() {
        if subset.len() <= leaf_capacity {
            tree.nodes[node as usize] = FlatNode {
                kind: LEAF,
                a: tree.leaf_items.len() as u32,
                b: subset.len() as u32,
                c: 0,
            };
            tree.leaf_items.extend_from_slice(&subset);
            continue;
        }

        let (plane, left, right) = split(&subset, dim, rng, row);
        let split_idx = (tree.splits.len() / (dim + 1)) as u32;
        tree.splits.extend_from_slice(&plane);
        let l = tree.nodes.len() as u32;
        tree.nodes.push(FlatNode {
            kind: LEAF,
            a: 0,
            b: 0,
            c: 0,
        });
        tree.nodes.push(FlatNode {
            kind: LEAF,
            a: 0,
            b: 0,
            c: 0,
        });
        tree.nodes[node as usize] = FlatNode {
            kind: SPLIT,
            a: l,
            b: l + 1,
            c: split_idx,
        };
        stack.push((l + 1, right));
        stack.push((l, left));
    }
    tree
}

/// Returns `normal ++ [offset]` and the two non-empty sides.
fn split<'a>(
    subset: &[u32],
    dim: usize,
    rng: &mut SeededRng,
    row: impl Fn(u32) -> &'a [f32],
) -> (Vec<f32>, Vec<u32>, Vec<u32>) {
    let n = subset.len();
    for _ in 0..=MAX_SPLIT_RETRIES {
        let i = rng::below(rng, n);
        let mut j = rng::below(rng, n - 1);
        if j >= i {
            j += 1;
        }
        let (p, q) = (row(subset[i]), row(subset[j]));
        let diff: Vec<f64> = p.iter().zip(q).map(|(&a, &b)| a as f64 - b as f64).collect();
        let len = diff.iter().map(|d| d * d).sum::<f64>().sqrt();
        if len == 0.0 {
            continue;
        }
        let normal: Vec<f32> = diff.iter().map(|d| (d / len) as f32).collect();
        let offset = -normal
            .iter()
            .zip(p.iter().zip(q))
            .map(|(&w, (&a, &b))| w as f64 * (a as f64 + b as f64) * 0.5)
            .sum::<f64>() as f32;

        let (left, right): (Vec<u32>, Vec<u32>) = subset.iter().partition(|&&x| margin(&normal, offset, row(x)) <= 0.0);
        if !left.is_empty() && !right.is_empty() {
            let mut plane = normal;
            plane.push(offset);
            return (plane, left, right);
        }
    }

    // Degenerate data (e.g. identical points): route uniformly at random.
    loop {
        let (left, right): (Vec<u32>, Vec<u32>) = subset.iter().partition(|_| rng::coin(rng));
        if !left.is_empty() && !right.is_empty() {
            return (vec![0.0; dim + 1], left, right);
        }
    }
}

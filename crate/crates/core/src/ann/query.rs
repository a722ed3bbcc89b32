use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{margin, sort_neighbors, AnnIndex, Neighbor, Node};
use crate::error::{Error, Result};
use crate::linalg::{normalize, unit_distance};

/// Pending subtree, popped in order of largest priority (smallest margin
/// seen on the way down). Equal priorities pop the lower tree, then the
/// lower node, first.
struct Pending {
    priority: f64,
    tree: u32,
    node: u32,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority
            .total_cmp(&other.priority)
            .then_with(|| other.tree.cmp(&self.tree))
            .then_with(|| other.node.cmp(&self.node))
    }
}

struct Visited(Vec<u64>);

impl Visited {
    fn new(n: usize) -> Self {
        Visited(vec![0; n.div_ceil(64)])
    }

    /// Marks `i`; true when it was not marked before.
    #[inline]
    fn insert(&mut self, i: u32) -> bool {
        let (w, bit) = ((i / 64) as usize, 1u64 << (i % 64));
        let fresh = self.0[w] & bit == 0;
        self.0[w] |= bit;
        fresh
    }
}

impl AnnIndex {
    /// The `k` nearest items to `q` by angular distance.
    ///
    /// Inspects at least `search_k` distinct candidates (default
    /// `n_trees * k`) drawn from the leaves closest to `q` across all trees;
    /// with `search_k >= len()` the answer is exact. Results are sorted by
    /// distance, then item id.
    pub fn query(&self, q: &[f32], k: usize, search_k: Option<usize>) -> Result<Vec<Neighbor>> {
        if k == 0 {
            return Err(Error::ZeroK);
        }
        if q.len() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: q.len(),
            });
        }
        let search_k = match search_k {
            Some(0) => return Err(Error::InvalidConfig("search_k must be at least 1".into())),
            Some(s) => s,
            None => self.n_trees().saturating_mul(k),
        };
        let q = normalize(q)?;
        let dim = self.dim();

        let mut heap: BinaryHeap<Pending> = (0..self.trees.len() as u32)
            .map(|tree| Pending {
                priority: f64::INFINITY,
                tree,
                node: 0,
            })
            .collect();
        let mut visited = Visited::new(self.len());
        let mut candidates: Vec<u32> = Vec::with_capacity(search_k.min(self.len()));

        while candidates.len() < search_k {
            let Some(Pending {
                priority,
                tree,
                mut node,
            }) = heap.pop()
            else {
                break;
            };
            let t = &self.trees[tree as usize];
            loop {
                match t.node(node, dim) {
                    Node::Leaf { items } => {
                        candidates.extend(items.iter().filter(|&&i| visited.insert(i)));
                        break;
                    }
                    Node::Split {
                        normal,
                        offset,
                        left,
                        right,
                    } => {
                        let m = margin(normal, offset, &q);
                        let (near, far) = if m <= 0.0 { (left, right) } else { (right, left) };
                        heap.push(Pending {
                            priority: priority.min(m.abs()),
                            tree,
                            node: far,
                        });
                        node = near;
                    }
                }
            }
        }

        let mut out: Vec<Neighbor> = candidates
            .into_iter()
            .map(|i| Neighbor {
                item_id: i as usize,
                distance: unit_distance(&q, &self.items[i as usize * dim..][..dim]),
            })
            .collect();
        sort_neighbors(&mut out);
        out.truncate(k);
        Ok(out)
    }
}

//! Accuracy and latency of the forest against an exact linear scan.
//!
//! Ground truth for a query is the exact angular top-k set, so the exact
//! baseline scores 1 on every accuracy metric by construction.

mod bench;
mod synthetic;

pub use bench::{
    bench, latency_stats, random_unit_dataset, scalability, BenchConfig, EvalReport, LatencyStats, MetricsReport,
    ScalabilityConfig, ScalePoint, SearchK, REPORT_SCHEMA, REPORT_VERSION,
};
pub use synthetic::{gen_synthetic, write_synthetic, SyntheticCorpus};

use std::borrow::Cow;
use std::collections::HashSet;

use rand::seq::index::sample;

use crate::ann::{sort_neighbors, AnnIndex, Neighbor};
use crate::corpus::RecordSet;
use crate::error::{Error, Result};
use crate::linalg::{normalize, unit_distance};
use crate::rng;

/// Brute-force nearest neighbours with the same normalization, distance
/// and tie-breaking as [`AnnIndex::query`].
#[derive(Debug, Clone)]
pub struct ExactOracle<'a> {
    items: Cow<'a, [f32]>,
    dim: usize,
}

impl<'a> ExactOracle<'a> {
    /// Shares the index's normalized item matrix.
    pub fn new(index: &'a AnnIndex) -> Self {
        ExactOracle {
            items: Cow::Borrowed(index.items()),
            dim: index.dim(),
        }
    }

    pub fn from_vectors<V: AsRef<[f32]>>(vectors: &[V], dim: usize) -> Result<ExactOracle<'static>> {
        let mut items = Vec::with_capacity(vectors.len() * dim);
        for (id, v) in vectors.iter().enumerate() {
            let v = v.as_ref();
            if v.len() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            items.extend(normalize(v).map_err(|_| Error::ZeroItem(id))?);
        }
        Ok(ExactOracle {
            items: Cow::Owned(items),
            dim,
        })
    }

    pub fn len(&self) -> usize {
        self.items.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn exact_knn(&self, q: &[f32], k: usize) -> Result<Vec<Neighbor>> {
        if k == 0 {
            return Err(Error::ZeroK);
        }
        if q.len() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: q.len(),
            });
        }
        let q = normalize(q)?;
        let mut all: Vec<Neighbor> = self
            .items
            .chunks_exact(self.dim)
            .enumerate()
            .map(|(item_id, row)| Neighbor {
                item_id,
                distance: unit_distance(&q, row),
            })
            .collect();
        if k < all.len() {
            all.select_nth_unstable_by(k - 1, |a, b| {
                a.distance
                    .total_cmp(&b.distance)
                    .then_with(|| a.item_id.cmp(&b.item_id))
            });
            all.truncate(k);
        }
        sort_neighbors(&mut all);
        Ok(all)
    }
}

/// Same as [`ExactOracle::exact_knn`].
pub fn exact_knn(oracle: &ExactOracle<'_>, q: &[f32], k: usize) -> Result<Vec<Neighbor>> {
    oracle.exact_knn(q, k)
}

/// `|approx[..k] ∩ exact[..k]| / |exact[..k]|`.
pub fn recall_at_k(approx: &[usize], exact: &[usize], k: usize) -> Result<f64> {
    let exact = &exact[..exact.len().min(k)];
    if exact.is_empty() {
        return Err(Error::EmptyInput("exact neighbour list"));
    }
    let truth: HashSet<usize> = exact.iter().copied().collect();
    let approx: HashSet<usize> = approx[..approx.len().min(k)].iter().copied().collect();
    Ok(approx.intersection(&truth).count() as f64 / truth.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Prf1 {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Precision, recall and their harmonic mean; every ratio with an empty
/// denominator is 0.
pub fn prf1(approx: &[usize], relevant: &HashSet<usize>) -> Prf1 {
    let retrieved: HashSet<usize> = approx.iter().copied().collect();
    let hits = retrieved.intersection(relevant).count() as f64;
    let ratio = |d: usize| if d == 0 { 0.0 } else { hits / d as f64 };
    let (precision, recall) = (ratio(retrieved.len()), ratio(relevant.len()));
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Prf1 { precision, recall, f1 }
}

/// Texts of `n` distinct cells chosen uniformly at random, in cell order.
pub fn sample_cell_texts(records: &RecordSet, n: usize, seed: u64) -> Result<Vec<String>> {
    let cells: Vec<&str> = records.cells().map(|(_, text)| text).collect();
    if n == 0 || cells.is_empty() {
        return Err(Error::EmptyInput("query sample"));
    }
    let mut rng = rng::seeded(seed, 0);
    let mut picked = sample(&mut rng, cells.len(), n.min(cells.len())).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| cells[i].to_string()).collect())
}

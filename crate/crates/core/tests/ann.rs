mod common;

use proptest::prelude::*;
use semsearch::ann::{load_index, save_index, AnnIndex, IndexConfig, Node};
use semsearch::eval::{recall_at_k, ExactOracle};

use common::{naive_knn, random_vectors};

fn config(dim: usize, n_trees: usize, seed: u64) -> IndexConfig {
    let mut c = IndexConfig::new(dim);
    c.n_trees = n_trees;
    c.seed = seed;
    c
}

fn ids(hits: &[semsearch::ann::Neighbor]) -> Vec<usize> {
    hits.iter().map(|n| n.item_id).collect()
}

#[test]
fn exhaustive_budget_equals_brute_force() {
    let items = random_vectors(2000, 16, 1);
    let queries = random_vectors(200, 16, 2);
    let index = AnnIndex::build(&items, config(16, 10, 3)).unwrap();
    let oracle = ExactOracle::new(&index);
    for q in &queries {
        let ann = index.query(q, 10, Some(items.len())).unwrap();
        assert_eq!(ann, oracle.exact_knn(q, 10).unwrap());
        let naive = naive_knn(&items, q, 10);
        for (hit, (id, d)) in ann.iter().zip(&naive) {
            assert!((hit.distance as f64 - d).abs() < 1e-5, "{} vs {id}", hit.item_id);
        }
    }
}

#[test]
fn oracle_agrees_with_independent_scan() {
    let items = random_vectors(500, 12, 4);
    let oracle = ExactOracle::from_vectors(&items, 12).unwrap();
    for q in random_vectors(50, 12, 5) {
        let exact = oracle.exact_knn(&q, 500).unwrap();
        let naive = naive_knn(&items, &q, 500);
        let by_id: std::collections::HashMap<usize, f64> = naive.iter().copied().collect();
        for (hit, (id, d)) in exact.iter().zip(&naive) {
            assert!((hit.distance as f64 - d).abs() < 1e-5);
            // Ids may only disagree between items at equal distance.
            if hit.item_id != *id {
                assert!((by_id[&hit.item_id] - d).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn recall_rises_with_budget() {
    let items = random_vectors(10_000, 32, 6);
    let queries = random_vectors(100, 32, 7);
    let index = AnnIndex::build(&items, config(32, 10, 8)).unwrap();
    let oracle = ExactOracle::new(&index);
    let truth: Vec<Vec<usize>> = queries.iter().map(|q| ids(&oracle.exact_knn(q, 10).unwrap())).collect();
    let mut last = 0.0;
    for budget in [10, 40, 160, 640, items.len()] {
        let mut total = 0.0;
        for (q, t) in queries.iter().zip(&truth) {
            total += recall_at_k(&ids(&index.query(q, 10, Some(budget)).unwrap()), t, 10).unwrap();
        }
        let recall = total / queries.len() as f64;
        assert!(recall + 0.01 >= last, "budget {budget}: {recall} < {last}");
        last = recall;
    }
    assert_eq!(last, 1.0);
}

#[test]
fn same_seed_same_bytes() {
    let items = random_vectors(3000, 8, 9);
    let a = AnnIndex::build(&items, config(8, 6, 10)).unwrap().to_bytes();
    let b = AnnIndex::build(&items, config(8, 6, 10)).unwrap().to_bytes();
    assert_eq!(a, b);
    let c = AnnIndex::build(&items, config(8, 6, 11)).unwrap().to_bytes();
    assert_ne!(a, c);
}

#[test]
fn reload_preserves_query_results() {
    let items = random_vectors(1500, 10, 12);
    let index = AnnIndex::build(&items, config(10, 5, 13)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("index.ann");
    save_index(&index, &path).unwrap();
    let loaded = load_index(&path).unwrap();
    for q in random_vectors(100, 10, 14) {
        for budget in [None, Some(30), Some(1500)] {
            assert_eq!(
                index.query(&q, 7, budget).unwrap(),
                loaded.query(&q, 7, budget).unwrap()
            );
        }
    }
}

#[test]
fn split_sides_match_stored_hyperplanes() {
    let items = random_vectors(800, 6, 15);
    let index = AnnIndex::build(&items, config(6, 3, 16)).unwrap();
    for t in 0..index.n_trees() {
        let mut stack = vec![(0u32, (0..items.len() as u32).collect::<Vec<_>>())];
        while let Some((node, subset)) = stack.pop() {
            match index.node(t, node) {
                Node::Leaf { items: leaf } => {
                    let mut a = leaf.to_vec();
                    let mut b = subset;
                    a.sort_unstable();
                    b.sort_unstable();
                    assert_eq!(a, b);
                }
                Node::Split {
                    normal,
                    offset,
                    left,
                    right,
                } => {
                    let (l, r): (Vec<u32>, Vec<u32>) = subset.iter().partition(|&&i| {
                        let x = index.item(i as usize).unwrap();
                        normal.iter().zip(x).map(|(&w, &v)| w as f64 * v as f64).sum::<f64>() + offset as f64 <= 0.0
                    });
                    assert!(!l.is_empty() && !r.is_empty());
                    stack.push((left, l));
                    stack.push((right, r));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_tree_partitions_the_items(n in 1usize..300, dim in 1usize..6, cap in 2usize..20, seed in 0u64..1000) {
        let items = random_vectors(n, dim, seed);
        let mut c = config(dim, 3, seed);
        c.leaf_capacity = cap;
        let index = AnnIndex::build(&items, c).unwrap();
        for t in 0..index.n_trees() {
            let leaves = index.leaves(t);
            prop_assert!(leaves.iter().all(|l| !l.is_empty() && l.len() <= cap));
            let mut all = leaves.concat();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n as u32).collect::<Vec<_>>());
        }
    }

    #[test]
    fn results_are_sorted_distinct_and_sized(n in 1usize..200, k in 1usize..30, budget in 1usize..400, seed in 0u64..1000) {
        let items = random_vectors(n, 5, seed);
        let index = AnnIndex::build(&items, config(5, 4, seed)).unwrap();
        let q = &random_vectors(1, 5, seed + 1)[0];
        let hits = index.query(q, k, Some(budget)).unwrap();
        prop_assert!(hits.len() <= k.min(n));
        if budget >= n {
            prop_assert_eq!(hits.len(), k.min(n));
        }
        let mut seen = std::collections::HashSet::new();
        for w in hits.windows(2) {
            prop_assert!((w[0].distance, w[0].item_id) < (w[1].distance, w[1].item_id));
        }
        for h in &hits {
            prop_assert!(seen.insert(h.item_id));
            prop_assert!((0.0..=2.0).contains(&h.distance));
        }
    }

    #[test]
    fn stored_item_is_its_own_nearest(n in 1usize..150, seed in 0u64..1000) {
        let items = random_vectors(n, 4, seed);
        let index = AnnIndex::build(&items, config(4, 2, seed)).unwrap();
        let id = seed as usize % n;
        let hits = index.query(&items[id], 1, Some(n)).unwrap();
        prop_assert_eq!(hits[0].distance, 0.0);
    }
}

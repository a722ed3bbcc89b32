#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semsearch::corpus::{SentenceStream, Vocabulary};
use semsearch::embeddings::EmbeddingModel;
use semsearch::linalg::cosine;

pub const CLUSTER_A: [&str; 5] = ["a1", "a2", "a3", "a4", "a5"];
pub const CLUSTER_B: [&str; 5] = ["b1", "b2", "b3", "b4", "b5"];

/// `n` sentences of 4..=8 tokens, each drawn entirely from one cluster.
pub fn two_cluster_sentences(n: usize, seed: u64) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let pool = if i % 2 == 0 { &CLUSTER_A } else { &CLUSTER_B };
            let len = rng.random_range(4..=8);
            (0..len).map(|_| pool[rng.random_range(0..5)].to_string()).collect()
        })
        .collect()
}

pub fn encode(sentences: &[Vec<String>], vocab: &Vocabulary) -> SentenceStream {
    SentenceStream {
        sentences: sentences
            .iter()
            .map(|s| s.iter().filter_map(|t| vocab.id(t)).collect())
            .collect(),
        origins: vec![],
    }
}

/// Mean cosine over distinct same-cluster pairs and over cross-cluster pairs.
pub fn cluster_cosines(model: &EmbeddingModel) -> (f64, f64) {
    let v = |t: &str| model.vector(t).expect("cluster token in vocab");
    let mut intra = Vec::new();
    for pool in [&CLUSTER_A, &CLUSTER_B] {
        for i in 0..5 {
            for j in i + 1..5 {
                intra.push(cosine(v(pool[i]), v(pool[j])).unwrap());
            }
        }
    }
    let mut inter = Vec::new();
    for a in CLUSTER_A {
        for b in CLUSTER_B {
            inter.push(cosine(v(a), v(b)).unwrap());
        }
    }
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    (mean(&intra), mean(&inter))
}

pub fn random_vectors(n: usize, dim: usize, seed: u64) -> Vec<Vec<f32>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(-1.0f32..1.0)).collect())
        .collect()
}

/// Independent SGNS objective over f64 matrices.
pub fn reference_loss(
    input: &[f64],
    output: &[f64],
    dim: usize,
    center: usize,
    context: usize,
    negatives: &[usize],
) -> f64 {
    let row = |m: &[f64], i: usize| m[i * dim..(i + 1) * dim].to_vec();
    let v = row(input, center);
    let dot = |u: &[f64]| u.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>();
    let mut loss = (1.0 + (-dot(&row(output, context))).exp()).ln();
    for &n in negatives {
        loss += (1.0 + dot(&row(output, n)).exp()).ln();
    }
    loss
}

/// Worst relative error between the analytic SGNS gradient and central
/// finite differences. Coordinates where both values are below `1e-5` are
/// compared absolutely (against `1e-9`) since relative error is meaningless
/// there; a failing absolute check is reported as `f64::INFINITY`.
pub fn gradient_check(model: &EmbeddingModel, center: u32, context: u32, negatives: &[u32], h: f64) -> f64 {
    let dim = model.dim();
    let grad = semsearch::embeddings::sgns_gradient(model, center, context, negatives).unwrap();
    let mut input: Vec<f64> = model.input_vectors().iter().map(|&x| x as f64).collect();
    let mut output: Vec<f64> = model.output_vectors().iter().map(|&x| x as f64).collect();
    let negs: Vec<usize> = negatives.iter().map(|&n| n as usize).collect();
    let (c, ctx) = (center as usize, context as usize);

    let mut worst: f64 = 0.0;
    let mut compare = |analytic: f64, numeric: f64| {
        let scale = analytic.abs().max(numeric.abs());
        let err = if scale < 1e-5 {
            if (analytic - numeric).abs() < 1e-9 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (analytic - numeric).abs() / scale
        };
        worst = worst.max(err);
    };

    for k in 0..dim {
        let i = c * dim + k;
        let orig = input[i];
        input[i] = orig + h;
        let plus = reference_loss(&input, &output, dim, c, ctx, &negs);
        input[i] = orig - h;
        let minus = reference_loss(&input, &output, dim, c, ctx, &negs);
        input[i] = orig;
        compare(grad.center[k], (plus - minus) / (2.0 * h));
    }
    for (id, row) in &grad.outputs {
        for (k, &analytic) in row.iter().enumerate() {
            let i = *id as usize * dim + k;
            let orig = output[i];
            output[i] = orig + h;
            let plus = reference_loss(&input, &output, dim, c, ctx, &negs);
            output[i] = orig - h;
            let minus = reference_loss(&input, &output, dim, c, ctx, &negs);
            output[i] = orig;
            compare(analytic, (plus - minus) / (2.0 * h));
        }
    }
    // Rows the gradient omits must have zero derivative.
    let touched: Vec<usize> = grad.outputs.iter().map(|(id, _)| *id as usize).collect();
    assert!(negs.iter().chain([&ctx]).all(|id| touched.contains(id)));
    worst
}

/// Random model with entries in [-1, 1], for gradient checks.
pub fn random_model(v: usize, dim: usize, seed: u64) -> EmbeddingModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab = Vocabulary::from_entries((0..v).map(|i| (format!("w{i}"), (v - i) as u64))).unwrap();
    let mut m = || (0..v * dim).map(|_| rng.random_range(-1.0f32..1.0)).collect::<Vec<_>>();
    let (input, output) = (m(), m());
    let config = semsearch::embeddings::TrainConfig {
        dim,
        ..Default::default()
    };
    EmbeddingModel::from_matrices(vocab, config, input, output).unwrap()
}

/// Independent brute-force top-k: f64 angular distances from cosines,
/// full sort by (distance, id).
pub fn naive_knn(items: &[Vec<f32>], q: &[f32], k: usize) -> Vec<(usize, f64)> {
    let norm = |v: &[f32]| v.iter().map(|&x| (x as f64).powi(2)).sum::<f64>().sqrt();
    let qn = norm(q);
    let mut all: Vec<(usize, f64)> = items
        .iter()
        .enumerate()
        .map(|(id, v)| {
            let dot: f64 = v.iter().zip(q).map(|(&a, &b)| a as f64 * b as f64).sum();
            let cos = (dot / (norm(v) * qn)).clamp(-1.0, 1.0);
            (id, (2.0 - 2.0 * cos).max(0.0).sqrt())
        })
        .collect();
    all.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

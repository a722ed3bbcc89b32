//! Shared inputs for the benchmarks.

use semsearch::corpus::{encode_sentences, read_csv, RecordSet, SentenceStream, Vocabulary};
use semsearch::eval::{gen_synthetic, random_unit_dataset};

/// Items and queries drawn from disjoint RNG streams.
pub fn vectors(n: usize, n_queries: usize, dim: usize, seed: u64) -> (Vec<Vec<f32>>, Vec<Vec<f32>>) {
    (
        random_unit_dataset(n, dim, seed, 0),
        random_unit_dataset(n_queries, dim, seed, 1),
    )
}

/// Synthetic corpus of `rows` records with its vocabulary and id stream.
pub fn corpus(rows: usize, clusters: usize, seed: u64) -> (RecordSet, Vocabulary, SentenceStream) {
    let data = gen_synthetic(rows, clusters, seed).expect("valid generator arguments");
    let records = read_csv(data.csv.as_bytes(), &["center_name".into(), "state".into()], Some("id"))
        .expect("generated CSV parses");
    let vocab = Vocabulary::build(&records.token_sentences(), 1).expect("non-empty corpus");
    let stream = encode_sentences(&records, &vocab);
    (records, vocab, stream)
}

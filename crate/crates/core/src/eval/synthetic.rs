use std::path::Path;

use crate::error::{Error, Result};
use crate::rng;

const SYLLABLES: [&str; 16] = [
    "ka", "ri", "mo", "te", "lu", "san", "vo", "pe", "di", "ran", "gu", "shi", "na", "bel", "to", "fa",
];

const STATES: [&str; 12] = [
    "Assam",
    "Bihar",
    "Goa",
    "Gujarat",
    "Haryana",
    "Karnataka",
    "Kerala",
    "Maharashtra",
    "Odisha",
    "Punjab",
    "Rajasthan",
    "Tamil Nadu",
];

/// Words per cluster pool.
const POOL_SIZE: usize = 24;
const MAX_SCORE: usize = 720;

/// A labelled CSV corpus with columns `id,center_name,state,score`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub csv: String,
    /// Cluster of each data row, in file order.
    pub labels: Vec<usize>,
    /// Disjoint word pool of each cluster.
    pub pools: Vec<Vec<String>>,
}

/// Pseudo-word for a global index; distinct indices give distinct words.
fn pseudo_word(mut i: usize) -> String {
    let mut word = String::new();
    loop {
        word.push_str(SYLLABLES[i % SYLLABLES.len()]);
        i /= SYLLABLES.len();
        if i == 0 {
            break;
        }
        i -= 1;
    }
    word
}

/// `n_records` rows whose `center_name` draws 2 to 4 words from the pool of
/// one cluster; clusters are assigned round-robin.
pub fn gen_synthetic(n_records: usize, n_clusters: usize, seed: u64) -> Result<SyntheticCorpus> {
    if n_clusters == 0 {
        return Err(Error::InvalidConfig("n_clusters must be at least 1".into()));
    }
    let pools: Vec<Vec<String>> = (0..n_clusters)
        .map(|c| {
            (0..POOL_SIZE)
                .map(|j| pseudo_word(SYLLABLES.len() + c * POOL_SIZE + j))
                .collect()
        })
        .collect();
    let mut rng = rng::seeded(seed, 0);
    let mut w = csv::Writer::from_writer(Vec::new());
    let write_err = |e: csv::Error| Error::InvalidConfig(format!("csv write failed: {e}"));
    w.write_record(["id", "center_name", "state", "score"])
        .map_err(write_err)?;
    let mut labels = Vec::with_capacity(n_records);
    for row in 0..n_records {
        let cluster = row % n_clusters;
        let n_words = 2 + rng::below(&mut rng, 3);
        let name: Vec<&str> = (0..n_words)
            .map(|_| pools[cluster][rng::below(&mut rng, POOL_SIZE)].as_str())
            .collect();
        let state = STATES[rng::below(&mut rng, STATES.len())];
        let score = rng::below(&mut rng, MAX_SCORE + 1);
        w.write_record([
            format!("S{:07}", row + 1),
            name.join(" "),
            state.to_string(),
            score.to_string(),
        ])
        .map_err(write_err)?;
        labels.push(cluster);
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let csv = String::from_utf8(bytes).expect("generated csv is ascii");
    Ok(SyntheticCorpus { csv, labels, pools })
}

pub fn write_synthetic(
    path: impl AsRef<Path>,
    n_records: usize,
    n_clusters: usize,
    seed: u64,
) -> Result<SyntheticCorpus> {
    let path = path.as_ref();
    let corpus = gen_synthetic(n_records, n_clusters, seed)?;
    std::fs::write(path, &corpus.csv).map_err(|e| Error::io(path, e))?;
    Ok(corpus)
}

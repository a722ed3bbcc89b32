//! Acceptance criteria, run in sequence so the latency measurements are not
//! disturbed by other tests. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semsearch::ann::{load_index, save_index, AnnIndex, IndexConfig};
use semsearch::corpus::{encode_sentences, load_csv, write_records, RecordSet, Vocabulary};
use semsearch::embeddings::{save_model, sgns_step, train, EmbeddingModel, TrainConfig};
use semsearch::eval::{recall_at_k, scalability, ExactOracle, ScalabilityConfig};
use semsearch::search::{build_engine, SearchEngine};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: Duration, detail: String) -> Outcome {
    check(
        elapsed < limit,
        format!(
            "{detail}; {:.2}s of {:.0}s budget",
            elapsed.as_secs_f64(),
            limit.as_secs_f64()
        ),
    )
}

fn ids(hits: &[semsearch::ann::Neighbor]) -> Vec<usize> {
    hits.iter().map(|n| n.item_id).collect()
}

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/students_100.csv")
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let n = 2000;
    let items = common::random_vectors(n, 16, 101);
    let queries = common::random_vectors(200, 16, 102);
    let mut config = IndexConfig::new(16);
    config.n_trees = 10;
    config.seed = 103;
    let index = AnnIndex::build(&items, config).map_err(|e| e.to_string())?;
    let oracle = ExactOracle::new(&index);
    let mut mismatches = 0;
    for q in &queries {
        for k in [10, n] {
            let ann = index.query(q, k, Some(n)).map_err(|e| e.to_string())?;
            if ann != oracle.exact_knn(q, k).map_err(|e| e.to_string())? {
                mismatches += 1;
            }
        }
    }
    if mismatches > 0 {
        return Err(format!("{mismatches} of 400 result lists differ"));
    }
    within(
        start.elapsed(),
        Duration::from_secs(10),
        "200 queries x k in {10, N}: identical ids and order".into(),
    )
}

fn gradient_check() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let dim = rng.random_range(1..=8);
        let v = 8;
        let model = common::random_model(v, dim, 1000 + case);
        let center = rng.random_range(0..v as u32);
        let context = rng.random_range(0..v as u32);
        let negatives: Vec<u32> = (0..rng.random_range(1..=3))
            .map(|_| rng.random_range(0..v as u32))
            .collect();
        worst = worst.max(common::gradient_check(&model, center, context, &negatives, 1e-4));
    }
    if worst >= 1e-4 {
        return Err(format!("worst relative error {worst:.3e}"));
    }
    within(
        start.elapsed(),
        Duration::from_secs(5),
        format!("100 instances, worst relative error {worst:.2e}"),
    )
}

fn zero_loss_anchor() -> Outcome {
    let mut worst: f64 = 0.0;
    for negatives in 1..=5usize {
        let v = 8;
        let dim = 4;
        let vocab = Vocabulary::from_entries((0..v).map(|i| (format!("t{i}"), 1))).map_err(|e| e.to_string())?;
        let config = TrainConfig {
            dim,
            negatives,
            ..Default::default()
        };
        let mut model = EmbeddingModel::from_matrices(vocab, config, vec![0.0; v * dim], vec![0.0; v * dim])
            .map_err(|e| e.to_string())?;
        let negs: Vec<u32> = (0..negatives as u32).map(|i| 2 + i).collect();
        let loss = sgns_step(&mut model, 0, 1, &negs, 0.025).map_err(|e| e.to_string())?;
        worst = worst.max((loss - (1 + negatives) as f64 * std::f64::consts::LN_2).abs());
    }
    check(
        worst < 1e-9,
        format!("negatives 1..=5, worst |loss - (1+n) ln 2| = {worst:.1e}"),
    )
}

fn semantic_clustering() -> Outcome {
    let start = Instant::now();
    let sentences = common::two_cluster_sentences(2000, 7);
    let vocab = Vocabulary::build(&sentences, 1).map_err(|e| e.to_string())?;
    let stream = common::encode(&sentences, &vocab);
    let config = TrainConfig {
        epochs: 5,
        seed: 1,
        ..Default::default()
    };
    let (model, _) = train(&stream, &vocab, &config).map_err(|e| e.to_string())?;
    let (intra, inter) = common::cluster_cosines(&model);
    let gap = intra - inter;
    if gap < 0.2 {
        return Err(format!("intra {intra:.3} - inter {inter:.3} = {gap:.3} < 0.2"));
    }
    within(
        start.elapsed(),
        Duration::from_secs(30),
        format!("intra {intra:.3}, inter {inter:.3}, gap {gap:.3} >= 0.2"),
    )
}

fn recall_trend() -> Outcome {
    let start = Instant::now();
    let n = 10_000;
    let items = common::random_vectors(n, 32, 501);
    let queries = common::random_vectors(100, 32, 502);
    let mut config = IndexConfig::new(32);
    config.seed = 503;
    let index = AnnIndex::build(&items, config).map_err(|e| e.to_string())?;
    let oracle = ExactOracle::new(&index);
    let truth: Vec<Vec<usize>> = queries
        .iter()
        .map(|q| oracle.exact_knn(q, 10).map(|h| ids(&h)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut curve = Vec::new();
    for budget in [10, 40, 160, 640, n] {
        let mut total = 0.0;
        for (q, t) in queries.iter().zip(&truth) {
            let hits = index.query(q, 10, Some(budget)).map_err(|e| e.to_string())?;
            total += recall_at_k(&ids(&hits), t, 10).map_err(|e| e.to_string())?;
        }
        curve.push(total / queries.len() as f64);
    }
    let shown: Vec<String> = curve.iter().map(|r| format!("{r:.3}")).collect();
    let detail = format!("recall@10 over search_k 10,40,160,640,N = [{}]", shown.join(", "));
    let monotone = curve.windows(2).all(|w| w[1] + 0.01 >= w[0]);
    if !monotone || curve[4] != 1.0 {
        return Err(detail);
    }
    within(start.elapsed(), Duration::from_secs(60), detail)
}

fn speed_scalability() -> Outcome {
    let start = Instant::now();
    let config = ScalabilityConfig {
        sizes: vec![10_000, 100_000],
        dim: 100,
        n_queries: 100,
        seed: 601,
        ..Default::default()
    };
    let points = scalability(&config).map_err(|e| e.to_string())?;
    let (small, large) = (&points[0], &points[1]);
    let speedup = large.exact.mean_us / large.ann.mean_us;
    let ann_growth = large.ann.mean_us / small.ann.mean_us;
    let exact_growth = large.exact.mean_us / small.exact.mean_us;
    let detail = format!(
        "N=100k: ann {:.1}us vs exact {:.1}us ({speedup:.1}x, need >= 5x); growth 10k->100k ann {ann_growth:.2}x vs exact {exact_growth:.2}x (need < {:.2}x); recall@10 {:.3}",
        large.ann.mean_us,
        large.exact.mean_us,
        exact_growth / 2.0,
        large.recall_at_k,
    );
    if speedup < 5.0 || ann_growth >= exact_growth / 2.0 {
        return Err(detail);
    }
    within(start.elapsed(), Duration::from_secs(600), detail)
}

fn fixture_records() -> Result<RecordSet, String> {
    load_csv(fixture(), &["center_name".into(), "state".into()], Some("id")).map_err(|e| e.to_string())
}

fn train_fixture(records: &RecordSet) -> Result<EmbeddingModel, String> {
    let vocab = Vocabulary::build(&records.token_sentences(), 1).map_err(|e| e.to_string())?;
    let stream = encode_sentences(records, &vocab);
    let config = TrainConfig {
        dim: 32,
        seed: 701,
        ..Default::default()
    };
    let (mut model, _) = train(&stream, &vocab, &config).map_err(|e| e.to_string())?;
    model.corpus_hash = records.content_hash();
    Ok(model)
}

fn determinism() -> Outcome {
    let records = fixture_records()?;
    let a = train_fixture(&records)?;
    let b = train_fixture(&records)?;
    if a.to_bytes() != b.to_bytes() {
        return Err("model bytes differ between identical runs".into());
    }
    let mut config = IndexConfig::new(32);
    config.seed = 702;
    let ea = SearchEngine::build(a, records.clone(), config.clone()).map_err(|e| e.to_string())?;
    let eb = SearchEngine::build(b, records.clone(), config).map_err(|e| e.to_string())?;
    if ea.index().to_bytes() != eb.index().to_bytes() {
        return Err("index bytes differ between identical runs".into());
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (m, i, r) = (
        dir.path().join("model.bin"),
        dir.path().join("index.ann"),
        dir.path().join("records.jsonl"),
    );
    save_model(ea.model(), &m).map_err(|e| e.to_string())?;
    save_index(ea.index(), &i).map_err(|e| e.to_string())?;
    write_records(&r, &records).map_err(|e| e.to_string())?;
    if load_index(&i).map_err(|e| e.to_string())?.to_bytes() != ea.index().to_bytes() {
        return Err("index changed across save/load".into());
    }
    let loaded = build_engine(&m, &i, &r).map_err(|e| e.to_string())?;
    let mut compared = 0;
    let texts: Vec<String> = records.cells().map(|(_, t)| t.to_string()).collect();
    for text in &texts {
        for budget in [None, Some(50), Some(ea.index().len())] {
            let x = ea.run_query(text, 10, budget).map_err(|e| e.to_string())?;
            let y = loaded.run_query(text, 10, budget).map_err(|e| e.to_string())?;
            if x != y {
                return Err(format!("query {text:?} (search_k {budget:?}) differs after reload"));
            }
            compared += 1;
        }
    }
    Ok(format!(
        "model and index byte-identical; {compared} query outputs equal after save/load"
    ))
}

fn cli(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_semsearch"))
        .args(args)
        .env_remove("SEMSEARCH_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.code() != Some(0) {
        return Err(format!(
            "`semsearch {}` exited {:?}: {}",
            args.first().unwrap_or(&""),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn end_to_end_cli() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| -> String { dir.path().join(name).to_string_lossy().into_owned() };
    let fixture = fixture();
    let fixture = fixture.to_str().ok_or("non-UTF-8 fixture path")?;
    cli(&[
        "ingest",
        "--input",
        fixture,
        "--text-cols",
        "center_name,state",
        "--id-col",
        "id",
        "--out",
        &p("records.jsonl"),
    ])?;
    cli(&[
        "train",
        "--records",
        &p("records.jsonl"),
        "--dim",
        "32",
        "--seed",
        "801",
        "--out",
        &p("model.bin"),
    ])?;
    cli(&[
        "build-index",
        "--model",
        &p("model.bin"),
        "--records",
        &p("records.jsonl"),
        "--seed",
        "802",
        "--out",
        &p("index.ann"),
        "--manifest",
        &p("manifest.json"),
    ])?;
    let records = fixture_records()?;
    let target = records.records[41]
        .text_of("center_name")
        .ok_or("fixture row lacks center_name")?
        .to_string();
    let engine_dir: &Path = dir.path();
    let out = cli(&[
        "query",
        "--engine-dir",
        engine_dir.to_str().ok_or("non-UTF-8 temp path")?,
        "--k",
        "5",
        "--search-k",
        "1000000",
        "--json",
        &target,
    ])?;
    let first: serde_json::Value =
        serde_json::from_str(out.lines().next().ok_or("no results")?).map_err(|e| e.to_string())?;
    let distance = first["distance"].as_f64().ok_or("missing distance")?;
    let detail = format!(
        "query {target:?}: rank {} {:?} at distance {distance:.2e}, exit 0",
        first["rank"],
        first["matched_text"].as_str().unwrap_or_default()
    );
    check(
        first["rank"] == 1 && first["matched_text"] == target.as_str() && distance <= 1e-5,
        detail,
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("gradient check", gradient_check),
        ("zero-loss anchor", zero_loss_anchor),
        ("semantic clustering", semantic_clustering),
        ("recall trend", recall_trend),
        ("speed and scalability", speed_scalability),
        ("determinism and round-trips", determinism),
        ("end-to-end CLI fixture", end_to_end_cli),
    ];
    let mut failed = 0;
    let mut err = std::io::stderr().lock();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let (status, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        let _ = writeln!(err, "acceptance {}: {status} {name}: {detail}", i + 1);
    }
    let _ = writeln!(err, "acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

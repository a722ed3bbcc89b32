use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::path::Path;

use anyhow::{Context, Result};
use semsearch::ann::{save_index, AnnIndex, IndexConfig};
use semsearch::corpus::{encode_sentences, load_csv, read_records, write_records, Vocabulary};
use semsearch::embeddings::{load_model, save_model, train, TrainConfig};
use semsearch::eval::{
    bench, sample_cell_texts, scalability, write_synthetic, BenchConfig, EvalReport, ExactOracle, ScalabilityConfig,
    REPORT_SCHEMA, REPORT_VERSION,
};
use semsearch::search::{cell_vectors, SearchEngine, SearchResult};
use semsearch::Error;
use serde_json::json;

use crate::engine_dir::{manifest_name, EngineDir, Files, Manifest};
use crate::{BenchArgs, BuildIndexArgs, Command, EvalArgs, GenDataArgs, IngestArgs, QueryArgs, ReplArgs, TrainArgs};

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Ingest(a) => ingest(a),
        Command::Train(a) => train_cmd(a),
        Command::BuildIndex(a) => build_index(a),
        Command::Query(a) => query(a),
        Command::Repl(a) => repl(a),
        Command::Eval(a) => eval(a),
        Command::Bench(a) => bench_cmd(a),
        Command::GenData(a) => gen_data(a),
    }
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn write_report(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.into(),
        source: e,
    })?;
    Ok(())
}

fn ingest(a: IngestArgs) -> Result<()> {
    let records = load_csv(&a.input, &a.text_cols, a.id_col.as_deref())?;
    if records.is_empty() {
        return Err(Error::EmptyInput("no complete rows in CSV").into());
    }
    let hash = write_records(&a.out, &records)?;
    if a.json {
        print_json(&json!({
            "rows": records.raw_rows,
            "dropped": records.dropped,
            "records": records.len(),
            "text_columns": records.text_columns,
            "corpus_hash": hex::encode(hash),
            "out": a.out,
        }))
    } else {
        println!(
            "{} rows read, {} dropped, {} records written to {}",
            records.raw_rows,
            records.dropped,
            records.len(),
            a.out.display()
        );
        println!("corpus {}", hex::encode(hash));
        Ok(())
    }
}

fn train_cmd(a: TrainArgs) -> Result<()> {
    let records = read_records(&a.records)?;
    let config = TrainConfig {
        dim: a.dim,
        window: a.window,
        min_count: a.min_count,
        negatives: a.negatives,
        epochs: a.epochs,
        initial_lr: a.lr,
        seed: a.seed,
        subsample_t: a.subsample,
    };
    config.validate()?;
    let vocab = Vocabulary::build(&records.token_sentences(), config.min_count)?;
    let stream = encode_sentences(&records, &vocab);
    let (mut model, report) = train(&stream, &vocab, &config)?;
    model.corpus_hash = records.content_hash();
    save_model(&model, &a.out)?;
    if a.json {
        print_json(&json!({
            "vocab_size": model.vocab().len(),
            "dim": model.dim(),
            "total_pairs": report.total_pairs,
            "epoch_losses": report.epoch_losses,
            "out": a.out,
        }))
    } else {
        println!(
            "vocabulary {} tokens, {} training pairs",
            model.vocab().len(),
            report.total_pairs
        );
        for (i, loss) in report.epoch_losses.iter().enumerate() {
            println!("epoch {}: mean loss {loss:.6}", i + 1);
        }
        println!("model written to {}", a.out.display());
        Ok(())
    }
}

fn build_index(a: BuildIndexArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let records = read_records(&a.records)?;
    let mut config = IndexConfig::new(model.dim());
    config.n_trees = a.trees;
    config.leaf_capacity = a.leaf_cap;
    config.seed = a.seed;
    if model.corpus_hash != records.content_hash() {
        return Err(Error::Provenance(format!(
            "model {} was not trained on records {}",
            a.model.display(),
            a.records.display()
        ))
        .into());
    }
    let (vectors, _) = cell_vectors(&model, &records);
    if vectors.is_empty() {
        return Err(Error::EmptyInput("no cell has an in-vocabulary token").into());
    }
    let mut index = AnnIndex::build(&vectors, config)?;
    index.corpus_hash = records.content_hash();
    save_index(&index, &a.out)?;
    if let Some(path) = &a.manifest {
        let files = Files {
            records: manifest_name(path, &a.records),
            model: manifest_name(path, &a.model),
            index: manifest_name(path, &a.out),
        };
        Manifest::describe(files, &model, &index, &records).save(path)?;
    }
    if a.json {
        print_json(&json!({
            "items": index.len(),
            "dim": index.dim(),
            "trees": index.n_trees(),
            "out": a.out,
            "manifest": a.manifest,
        }))
    } else {
        println!(
            "indexed {} cells of {} records ({} trees) into {}",
            index.len(),
            records.len(),
            index.n_trees(),
            a.out.display()
        );
        Ok(())
    }
}

fn result_json(r: &SearchResult<'_>) -> serde_json::Value {
    let metadata: BTreeMap<&str, &str> = r
        .record
        .metadata
        .iter()
        .map(|(k, v)| (k.as_str(), v.as_str()))
        .collect();
    json!({
        "rank": r.rank,
        "item_id": r.item_id,
        "distance": r.distance,
        "row_id": r.row_id,
        "id": r.record.id,
        "column": r.column,
        "matched_text": r.matched_text,
        "metadata": metadata,
    })
}

fn print_results(results: &[SearchResult<'_>], as_json: bool) -> Result<()> {
    let mut out = io::stdout().lock();
    if as_json {
        for r in results {
            serde_json::to_writer(&mut out, &result_json(r))?;
            writeln!(out)?;
        }
        return Ok(());
    }
    writeln!(
        out,
        "{:>4}  {:>8}  {:>6}  {:<12}  {:<14}  text",
        "rank", "distance", "row", "id", "column"
    )?;
    for r in results {
        writeln!(
            out,
            "{:>4}  {:>8.5}  {:>6}  {:<12}  {:<14}  {}",
            r.rank,
            r.distance,
            r.row_id,
            r.record.id.as_deref().unwrap_or("-"),
            r.column,
            r.matched_text
        )?;
    }
    Ok(())
}

fn query(a: QueryArgs) -> Result<()> {
    let engine = EngineDir::new(&a.engine_dir).open()?;
    let results = engine.run_query(&a.text.join(" "), a.k, a.search_k)?;
    print_results(&results, a.json)
}

fn repl(a: ReplArgs) -> Result<()> {
    let engine = EngineDir::new(&a.engine_dir).open()?;
    let (mut k, mut search_k) = (a.k, a.search_k);
    for line in io::stdin().lock().lines() {
        let line = line.context("reading standard input")?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix(':') {
            match directive(rest, &mut k, &mut search_k) {
                Ok(()) => {}
                Err(msg) => eprintln!("error: {msg}"),
            }
            continue;
        }
        match engine.run_query(line, k, search_k) {
            Ok(results) => print_results(&results, a.json)?,
            Err(e) => eprintln!("error: {e}"),
        }
        io::stdout().flush()?;
    }
    Ok(())
}

/// `:k <n>` and `:searchk <n|default>`.
fn directive(rest: &str, k: &mut usize, search_k: &mut Option<usize>) -> Result<(), String> {
    let mut parts = rest.split_whitespace();
    let (name, value) = (parts.next().unwrap_or(""), parts.next());
    let positive = |v: Option<&str>| match v.map(str::parse::<usize>) {
        Some(Ok(n)) if n > 0 => Ok(n),
        _ => Err(format!("`:{name}` needs a positive integer")),
    };
    match name {
        "k" => *k = positive(value)?,
        "searchk" | "search_k" => {
            *search_k = if value == Some("default") {
                None
            } else {
                Some(positive(value)?)
            }
        }
        _ => return Err(format!("unknown directive `:{name}`")),
    }
    Ok(())
}

fn load_workload(a: &EvalArgs, engine: &SearchEngine) -> Result<Vec<Vec<f32>>> {
    let texts = match (&a.queries, a.sample) {
        (Some(path), _) => std::fs::read_to_string(path)
            .map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect(),
        (None, Some(n)) => sample_cell_texts(engine.records(), n, a.seed)?,
        (None, None) => unreachable!("clap requires a workload"),
    };
    let mut vectors = Vec::with_capacity(texts.len());
    let mut skipped = 0;
    for text in &texts {
        match engine.embed(text) {
            Ok(v) => vectors.push(v),
            Err(Error::UnresolvableQuery { .. }) => skipped += 1,
            Err(e) => return Err(e.into()),
        }
    }
    if skipped > 0 {
        eprintln!("skipped {skipped} queries with no in-vocabulary tokens");
    }
    if vectors.is_empty() {
        return Err(Error::EmptyInput("query workload").into());
    }
    Ok(vectors)
}

fn eval(a: EvalArgs) -> Result<()> {
    let engine = EngineDir::new(&a.engine_dir).open()?;
    let queries = load_workload(&a, &engine)?;
    let config = BenchConfig {
        k: a.k,
        grid: a.search_k_grid.clone(),
        warmup: a.warmup,
        repetitions: a.reps,
    };
    let oracle = ExactOracle::new(engine.index());
    let points = bench(engine.index(), &oracle, &queries, &config)?;
    let report = EvalReport::new(&config, points);
    if let Some(path) = &a.report {
        write_report(path, &report)?;
    }
    if a.json {
        return print_json(&report);
    }
    if a.report.is_none() {
        println!("{}", serde_json::to_string_pretty(&report)?);
        return Ok(());
    }
    println!(
        "{} queries, k={}, {} items, {} trees",
        queries.len(),
        a.k,
        engine.index().len(),
        engine.index().n_trees()
    );
    println!(
        "{:>9}  {:>9}  {:>9}  {:>9}  {:>11}  {:>11}",
        "search_k", "recall@k", "precision", "f1", "ann mean us", "exact mean us"
    );
    for p in &report.points {
        println!(
            "{:>9}  {:>9.4}  {:>9.4}  {:>9.4}  {:>11.1}  {:>11.1}",
            p.search_k, p.recall_at_k, p.precision, p.f1, p.ann.mean_us, p.exact.mean_us
        );
    }
    Ok(())
}

fn bench_cmd(a: BenchArgs) -> Result<()> {
    let config = ScalabilityConfig {
        sizes: a.sizes,
        dim: a.dim,
        n_queries: a.queries,
        k: a.k,
        search_k: a.search_k,
        n_trees: a.trees,
        leaf_capacity: a.leaf_cap,
        seed: a.seed,
        warmup: a.warmup,
        repetitions: a.reps,
    };
    if config.sizes.is_empty() || config.n_queries == 0 {
        return Err(Error::InvalidConfig("bench needs at least one size and one query".into()).into());
    }
    let points = scalability(&config)?;
    let report = json!({
        "schema": REPORT_SCHEMA,
        "schema_version": REPORT_VERSION,
        "kind": "scalability",
        "clock": "monotonic",
        "warmup": config.warmup,
        "repetitions": config.repetitions,
        "aggregate": "per-query median",
        "seed": config.seed,
        "points": points,
    });
    if let Some(path) = &a.report {
        write_report(path, &report)?;
    }
    if a.json {
        return print_json(&report);
    }
    println!(
        "{:>9}  {:>8}  {:>9}  {:>11}  {:>13}  {:>8}",
        "items", "build s", "recall@k", "ann mean us", "exact mean us", "speedup"
    );
    for p in &points {
        println!(
            "{:>9}  {:>8.2}  {:>9.4}  {:>11.1}  {:>13.1}  {:>7.1}x",
            p.n_items,
            p.build_secs,
            p.recall_at_k,
            p.ann.mean_us,
            p.exact.mean_us,
            p.exact.mean_us / p.ann.mean_us
        );
    }
    Ok(())
}

fn gen_data(a: GenDataArgs) -> Result<()> {
    let corpus = write_synthetic(&a.out, a.rows, a.clusters, a.seed)?;
    if a.json {
        print_json(&json!({ "rows": corpus.labels.len(), "clusters": corpus.pools.len(), "out": a.out }))
    } else {
        println!(
            "{} rows in {} clusters written to {}",
            corpus.labels.len(),
            corpus.pools.len(),
            a.out.display()
        );
        Ok(())
    }
}

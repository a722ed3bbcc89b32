mod commands;
mod engine_dir;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};

const DEFAULT_SEED: u64 = 42;

#[derive(Parser, Debug)]
#[command(name = "semsearch", about = "Semantic search over CSV text columns")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a CSV file into a record store.
    Ingest(IngestArgs),
    /// Train word embeddings over a record store.
    Train(TrainArgs),
    /// Index one vector per text cell.
    BuildIndex(BuildIndexArgs),
    /// Run one query against an engine directory.
    Query(QueryArgs),
    /// Read queries from standard input, one per line.
    Repl(ReplArgs),
    /// Compare the index against an exact scan on a query workload.
    Eval(EvalArgs),
    /// Measure query latency against item count on synthetic vectors.
    Bench(BenchArgs),
    /// Write a synthetic clustered CSV corpus.
    GenData(GenDataArgs),
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated text columns to index.
    #[arg(long, value_delimiter = ',', required = true)]
    pub text_cols: Vec<String>,
    #[arg(long)]
    pub id_col: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long)]
    pub records: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub dim: usize,
    #[arg(long, default_value_t = 5)]
    pub window: usize,
    #[arg(long, default_value_t = 1)]
    pub min_count: u64,
    #[arg(long, default_value_t = 5)]
    pub negatives: usize,
    #[arg(long, default_value_t = 5)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.025)]
    pub lr: f64,
    /// Frequent-word subsampling threshold; 0 disables it.
    #[arg(long, default_value_t = 0.0)]
    pub subsample: f64,
    #[arg(long, env = "SEMSEARCH_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = "model.bin")]
    pub out: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct BuildIndexArgs {
    #[arg(long, default_value = "model.bin")]
    pub model: PathBuf,
    #[arg(long)]
    pub records: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub trees: usize,
    #[arg(long, default_value_t = 16)]
    pub leaf_cap: usize,
    #[arg(long, env = "SEMSEARCH_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = "index.ann")]
    pub out: PathBuf,
    /// Also write an engine manifest describing the three artifacts.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct QueryArgs {
    #[arg(long)]
    pub engine_dir: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Candidate budget; defaults to trees × k.
    #[arg(long)]
    pub search_k: Option<usize>,
    #[arg(long)]
    pub json: bool,
    #[arg(required = true, num_args = 1..)]
    pub text: Vec<String>,
}

#[derive(Args, Debug)]
pub struct ReplArgs {
    #[arg(long)]
    pub engine_dir: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long)]
    pub search_k: Option<usize>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub engine_dir: PathBuf,
    /// File with one query per line.
    #[arg(long, required_unless_present = "sample", conflicts_with = "sample")]
    pub queries: Option<PathBuf>,
    /// Use the texts of this many randomly chosen indexed cells as queries.
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Comma-separated budgets; `exact` inspects every item.
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000,exact")]
    pub search_k_grid: Vec<semsearch::eval::SearchK>,
    #[arg(long, default_value_t = 3)]
    pub warmup: usize,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    #[arg(long, env = "SEMSEARCH_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Comma-separated item counts.
    #[arg(long, value_delimiter = ',', default_value = "10000,50000,100000")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub dim: usize,
    #[arg(long, default_value_t = 100)]
    pub queries: usize,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 10)]
    pub trees: usize,
    #[arg(long, default_value_t = 16)]
    pub leaf_cap: usize,
    #[arg(long)]
    pub search_k: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub warmup: usize,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    #[arg(long, env = "SEMSEARCH_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct GenDataArgs {
    #[arg(long)]
    pub rows: usize,
    #[arg(long, default_value_t = 4)]
    pub clusters: usize,
    #[arg(long, env = "SEMSEARCH_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub json: bool,
}

fn version_text() -> String {
    format!(
        "{} (model W2VM v{}, index ANNF v{}, records {} v{}, manifest {} v{}, eval report {} v{})",
        env!("CARGO_PKG_VERSION"),
        semsearch::embeddings::MODEL_VERSION,
        semsearch::ann::INDEX_VERSION,
        semsearch::corpus::RECORDS_FORMAT,
        semsearch::corpus::RECORDS_VERSION,
        engine_dir::MANIFEST_FORMAT,
        engine_dir::MANIFEST_VERSION,
        semsearch::eval::REPORT_SCHEMA,
        semsearch::eval::REPORT_VERSION,
    )
}

/// 1 for problems with the user's input or configuration, 2 for anything
/// else.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<semsearch::Error>() {
            return if e.is_user_error() { 1 } else { 2 };
        }
    }
    2
}

fn main() -> ExitCode {
    let matches = match Cli::command().version(version_text()).try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::{prf1, recall_at_k, ExactOracle};
use crate::ann::{AnnIndex, IndexConfig};
use crate::error::{Error, Result};
use crate::rng;

pub const REPORT_SCHEMA: &str = "semsearch-eval";
pub const REPORT_VERSION: u32 = 1;

/// One `search_k` grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchK {
    Budget(usize),
    /// Inspect every item.
    Exact,
}

impl SearchK {
    pub fn resolve(self, n_items: usize) -> usize {
        match self {
            SearchK::Budget(b) => b,
            SearchK::Exact => n_items,
        }
    }
}

impl FromStr for SearchK {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exact" | "N" | "n" => Ok(SearchK::Exact),
            other => match other.parse::<usize>() {
                Ok(b) if b > 0 => Ok(SearchK::Budget(b)),
                _ => Err(Error::InvalidConfig(format!("bad search_k `{other}`"))),
            },
        }
    }
}

impl fmt::Display for SearchK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchK::Budget(b) => write!(f, "{b}"),
            SearchK::Exact => f.write_str("exact"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub k: usize,
    pub grid: Vec<SearchK>,
    /// Untimed runs per query before measuring.
    pub warmup: usize,
    /// Timed runs per query; the per-query median is kept.
    pub repetitions: usize,
}

impl BenchConfig {
    pub fn new(k: usize, grid: Vec<SearchK>) -> Self {
        BenchConfig {
            k,
            grid,
            warmup: 3,
            repetitions: 10,
        }
    }
}

/// Latency summary over per-query medians, in microseconds. Percentiles use
/// the nearest-rank method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatencyStats {
    pub mean_us: f64,
    pub p50_us: f64,
    pub p95_us: f64,
    pub p99_us: f64,
}

pub fn latency_stats(per_query: &[Duration]) -> LatencyStats {
    if per_query.is_empty() {
        return LatencyStats {
            mean_us: 0.0,
            p50_us: 0.0,
            p95_us: 0.0,
            p99_us: 0.0,
        };
    }
    let mut us: Vec<f64> = per_query.iter().map(|d| d.as_secs_f64() * 1e6).collect();
    us.sort_by(f64::total_cmp);
    let rank = |p: f64| us[((p / 100.0 * us.len() as f64).ceil() as usize).clamp(1, us.len()) - 1];
    LatencyStats {
        mean_us: us.iter().sum::<f64>() / us.len() as f64,
        p50_us: rank(50.0),
        p95_us: rank(95.0),
        p99_us: rank(99.0),
    }
}

/// Median wall time of `reps` runs after `warmup` untimed runs.
fn time_median<T>(warmup: usize, reps: usize, mut f: impl FnMut() -> Result<T>) -> Result<Duration> {
    for _ in 0..warmup {
        std::hint::black_box(f()?);
    }
    let mut times = Vec::with_capacity(reps.max(1));
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        std::hint::black_box(f()?);
        times.push(start.elapsed());
    }
    times.sort_unstable();
    Ok(times[times.len() / 2])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub search_k: String,
    pub search_k_resolved: usize,
    pub k: usize,
    pub n_queries: usize,
    pub n_items: usize,
    pub dim: usize,
    pub n_trees: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub recall_at_k: f64,
    pub ann: LatencyStats,
    pub exact: LatencyStats,
}

/// Machine-readable evaluation document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub schema: &'static str,
    pub schema_version: u32,
    pub clock: &'static str,
    pub warmup: usize,
    pub repetitions: usize,
    pub aggregate: &'static str,
    pub points: Vec<MetricsReport>,
}

impl EvalReport {
    pub fn new(config: &BenchConfig, points: Vec<MetricsReport>) -> Self {
        EvalReport {
            schema: REPORT_SCHEMA,
            schema_version: REPORT_VERSION,
            clock: "monotonic",
            warmup: config.warmup,
            repetitions: config.repetitions,
            aggregate: "per-query median",
            points,
        }
    }
}

/// Accuracy and latency of `index` at every grid point, on one thread.
///
/// Exact-scan latency does not depend on `search_k`; it is measured once and
/// repeated in every point.
pub fn bench(
    index: &AnnIndex,
    oracle: &ExactOracle<'_>,
    queries: &[Vec<f32>],
    config: &BenchConfig,
) -> Result<Vec<MetricsReport>> {
    if queries.is_empty() {
        return Err(Error::EmptyInput("query workload"));
    }
    let k = config.k;
    let mut truth = Vec::with_capacity(queries.len());
    let mut exact_times = Vec::with_capacity(queries.len());
    for q in queries {
        truth.push(oracle.exact_knn(q, k)?);
        exact_times.push(time_median(config.warmup, config.repetitions, || {
            oracle.exact_knn(q, k)
        })?);
    }
    let exact = latency_stats(&exact_times);

    let mut reports = Vec::with_capacity(config.grid.len());
    for &point in &config.grid {
        let search_k = point.resolve(index.len());
        let (mut p, mut r, mut f, mut rk) = (0.0, 0.0, 0.0, 0.0);
        let mut times = Vec::with_capacity(queries.len());
        for (q, exact_hits) in queries.iter().zip(&truth) {
            let hits = index.query(q, k, Some(search_k))?;
            times.push(time_median(config.warmup, config.repetitions, || {
                index.query(q, k, Some(search_k))
            })?);
            let approx: Vec<usize> = hits.iter().map(|n| n.item_id).collect();
            let exact_ids: Vec<usize> = exact_hits.iter().map(|n| n.item_id).collect();
            let relevant: HashSet<usize> = exact_ids.iter().copied().collect();
            let m = prf1(&approx, &relevant);
            p += m.precision;
            r += m.recall;
            f += m.f1;
            rk += recall_at_k(&approx, &exact_ids, k)?;
        }
        let n = queries.len() as f64;
        reports.push(MetricsReport {
            search_k: point.to_string(),
            search_k_resolved: search_k,
            k,
            n_queries: queries.len(),
            n_items: index.len(),
            dim: index.dim(),
            n_trees: index.n_trees(),
            precision: p / n,
            recall: r / n,
            f1: f / n,
            recall_at_k: rk / n,
            ann: latency_stats(&times),
            exact,
        });
    }
    Ok(reports)
}

/// `n` vectors with i.i.d. standard normal entries (uniform directions).
/// Stream `stream` of `seed` keeps items and queries independent.
pub fn random_unit_dataset(n: usize, dim: usize, seed: u64, stream: u64) -> Vec<Vec<f32>> {
    let mut rng = rng::seeded(seed, stream);
    (0..n)
        .map(|_| loop {
            let v: Vec<f32> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            if v.iter().any(|&x| x != 0.0) {
                break v;
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalabilityConfig {
    pub sizes: Vec<usize>,
    pub dim: usize,
    pub n_queries: usize,
    pub k: usize,
    /// `None` uses the query default, `n_trees * k`.
    pub search_k: Option<usize>,
    pub n_trees: usize,
    pub leaf_capacity: usize,
    pub seed: u64,
    pub warmup: usize,
    pub repetitions: usize,
}

impl Default for ScalabilityConfig {
    fn default() -> Self {
        ScalabilityConfig {
            sizes: vec![10_000, 50_000, 100_000],
            dim: 100,
            n_queries: 100,
            k: 10,
            search_k: None,
            n_trees: IndexConfig::DEFAULT_TREES,
            leaf_capacity: IndexConfig::DEFAULT_LEAF_CAPACITY,
            seed: 42,
            warmup: 3,
            repetitions: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalePoint {
    pub n_items: usize,
    pub dim: usize,
    pub search_k: usize,
    pub build_secs: f64,
    pub index_bytes: usize,
    pub recall_at_k: f64,
    pub ann: LatencyStats,
    pub exact: LatencyStats,
}

/// Latency of forest search and exact scan as the item count grows. Smaller
/// datasets are prefixes of the largest, and all sizes share one query set.
pub fn scalability(config: &ScalabilityConfig) -> Result<Vec<ScalePoint>> {
    let max_n = config.sizes.iter().copied().max().unwrap_or(0);
    let data = random_unit_dataset(max_n, config.dim, config.seed, 0);
    let queries = random_unit_dataset(config.n_queries, config.dim, config.seed, 1);
    let mut points = Vec::with_capacity(config.sizes.len());
    for &n in &config.sizes {
        let mut index_config = IndexConfig::new(config.dim);
        index_config.n_trees = config.n_trees;
        index_config.leaf_capacity = config.leaf_capacity;
        index_config.seed = config.seed;
        let start = Instant::now();
        let index = AnnIndex::build(&data[..n], index_config)?;
        let build_secs = start.elapsed().as_secs_f64();
        let search_k = config.search_k.unwrap_or(index.n_trees() * config.k);
        let bench_config = BenchConfig {
            k: config.k,
            grid: vec![SearchK::Budget(search_k)],
            warmup: config.warmup,
            repetitions: config.repetitions,
        };
        let oracle = ExactOracle::new(&index);
        let report = bench(&index, &oracle, &queries, &bench_config)?.remove(0);
        points.push(ScalePoint {
            n_items: n,
            dim: config.dim,
            search_k,
            build_secs,
            index_bytes: index.to_bytes().len(),
            recall_at_k: report.recall_at_k,
            ann: report.ann,
            exact: report.exact,
        });
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn search_k_parsing() {
        assert_eq!("exact".parse::<SearchK>().unwrap(), SearchK::Exact);
        assert_eq!(" 40 ".parse::<SearchK>().unwrap(), SearchK::Budget(40));
        assert!("0".parse::<SearchK>().is_err());
        assert!("lots".parse::<SearchK>().is_err());
        assert_eq!(SearchK::Exact.resolve(77), 77);
    }

    #[test]
    fn nearest_rank_percentiles() {
        let d: Vec<Duration> = (1..=100).map(Duration::from_micros).collect();
        let s = latency_stats(&d);
        assert!((s.mean_us - 50.5).abs() < 1e-9);
        assert_eq!((s.p50_us, s.p95_us, s.p99_us), (50.0, 95.0, 99.0));
        let one = latency_stats(&[Duration::from_micros(7)]);
        assert_eq!((one.p50_us, one.p99_us), (7.0, 7.0));
    }

    #[test]
    fn smoke_workload_schema() {
        let data = random_unit_dataset(300, 8, 1, 0);
        let queries = random_unit_dataset(10, 8, 1, 1);
        let index = AnnIndex::build(&data, IndexConfig::new(8)).unwrap();
        let oracle = ExactOracle::new(&index);
        let mut config = BenchConfig::new(5, vec![SearchK::Budget(10), SearchK::Exact]);
        config.repetitions = 2;
        config.warmup = 1;
        let reports = bench(&index, &oracle, &queries, &config).unwrap();
        assert_eq!(reports.len(), 2);
        for r in &reports {
            for x in [r.precision, r.recall, r.f1, r.recall_at_k] {
                assert!((0.0..=1.0).contains(&x));
            }
            assert_eq!(r.n_queries, 10);
            assert!(r.ann.mean_us > 0.0 && r.exact.mean_us > 0.0);
        }
        assert_eq!(reports[1].recall_at_k, 1.0);
        assert_eq!(reports[1].search_k_resolved, 300);
        let json = serde_json::to_value(EvalReport::new(&config, reports)).unwrap();
        assert_eq!(json["schema_version"], 1);
        assert!(json["points"][0]["ann"]["p95_us"].is_number());
        assert!(bench(&index, &oracle, &[], &config).is_err());
    }
}

//! Latency and recall measurement for the staged search.

use std::collections::{BTreeMap, HashSet};
use std::time::Instant;

use serde::Serialize;

use crate::error::InvalidArgument;
use crate::index::SearchIndex;
use crate::normalize::normalize_query;
use crate::search::{search_exhaustive, search_outcome, SearchParams};

/// Timings and counters for all queries of one folded length.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BenchRow {
    pub query_len: usize,
    pub queries: usize,
    pub samples: usize,
    pub p50_us: f64,
    pub p95_us: f64,
    pub p99_us: f64,
    pub mean_stage1: f64,
    pub mean_results: f64,
    /// Fraction of exhaustive results the staged search also found; `None`
    /// when the exhaustive search found nothing for this length.
    pub recall: Option<f64>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BenchReport {
    pub corpus_size: usize,
    pub reps: usize,
    pub rows: Vec<BenchRow>,
    pub recall: Option<f64>,
}

/// Nearest-rank percentile of an ascending slice.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

#[derive(Default)]
struct Bucket {
    queries: usize,
    latencies: Vec<f64>,
    stage1: usize,
    results: usize,
    found: usize,
    expected: usize,
}

/// Runs every query once to warm up, then `reps` timed passes.
pub fn run_bench(
    index: &SearchIndex,
    queries: &[String],
    reps: usize,
    params: &SearchParams,
) -> Result<BenchReport, InvalidArgument> {
    if reps == 0 {
        return Err(InvalidArgument::new("reps must be at least 1"));
    }
    for q in queries {
        search_outcome(index, q, params)?;
    }

    let unlimited = SearchParams {
        limit: 0,
        ..*params
    };
    let mut buckets: BTreeMap<usize, Bucket> = BTreeMap::new();
    for q in queries {
        let bucket = buckets.entry(normalize_query(q).len()).or_default();
        bucket.queries += 1;
        for _ in 0..reps {
            let start = Instant::now();
            let out = search_outcome(index, q, params)?;
            bucket.latencies.push(start.elapsed().as_secs_f64() * 1e6);
            bucket.stage1 += out.stage1_passed;
            bucket.results += out.results.len();
        }
        let staged: HashSet<u64> = search_outcome(index, q, &unlimited)?
            .results
            .iter()
            .map(|r| r.entry_id)
            .collect();
        let exhaustive = search_exhaustive(index, q, &unlimited)?;
        bucket.expected += exhaustive.len();
        bucket.found += exhaustive
            .iter()
            .filter(|r| staged.contains(&r.entry_id))
            .count();
    }

    let ratio =
        |found: usize, expected: usize| (expected > 0).then(|| found as f64 / expected as f64);
    let (mut found, mut expected) = (0, 0);
    let rows = buckets
        .into_iter()
        .map(|(query_len, mut b)| {
            b.latencies.sort_by(f64::total_cmp);
            let samples = b.latencies.len();
            found += b.found;
            expected += b.expected;
            BenchRow {
                query_len,
                queries: b.queries,
                samples,
                p50_us: percentile(&b.latencies, 50.0),
                p95_us: percentile(&b.latencies, 95.0),
                p99_us: percentile(&b.latencies, 99.0),
                mean_stage1: b.stage1 as f64 / samples as f64,
                mean_results: b.results as f64 / samples as f64,
                recall: ratio(b.found, b.expected),
            }
        })
        .collect();
    Ok(BenchReport {
        corpus_size: index.len(),
        reps,
        rows,
        recall: ratio(found, expected),
    })
}

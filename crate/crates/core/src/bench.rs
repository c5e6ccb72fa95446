//! Benchmark drivers: index build costs, per-engine query latency with
//! cross-engine agreement checks, scalability sweeps, and oracle
//! verification.
//!
//! Indexes are built once before any query is timed. Every measured query
//! is also compared across engines, so a benchmark run is a correctness run.

use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;

use crate::dataset::load_fimi;
use crate::engine::{CoOccurrenceIndex, EngineKind, QueryOutcome};
use crate::error::{BenchError, DatasetError, Mismatch};
use crate::model::{Query, TopKResult, TransactionDatabase};
use crate::oracle::oracle_topk;
use crate::pitree::PiTree;
use crate::report::{BenchRow, ResultEntry};
use crate::synth::{generate_queries, generate_synthetic, SyntheticParams};
use crate::tidset::TidSetIndex;

pub const DEFAULT_WARMUP: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub enum DbSource {
    File(PathBuf),
    Synthetic(SyntheticParams),
}

impl DbSource {
    pub fn load(&self) -> Result<TransactionDatabase, DatasetError> {
        match self {
            DbSource::File(path) => load_fimi(path),
            DbSource::Synthetic(params) => generate_synthetic(params),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub source: DbSource,
    pub engines: Vec<EngineKind>,
    pub query_lengths: Vec<usize>,
    pub queries_per_length: usize,
    pub k: usize,
    /// Seeds the query workloads.
    pub seed: u64,
    /// Discarded repetitions before timing each (engine, length) pair.
    pub warmup: usize,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.engines.is_empty() {
            return Err(BenchError::NoEngines);
        }
        if self.query_lengths.is_empty() || self.query_lengths.contains(&0) {
            return Err(BenchError::InvalidLengths);
        }
        if self.k == 0 {
            return Err(crate::error::QueryError::InvalidK.into());
        }
        Ok(())
    }

    /// Seed that reproduces the database, for mismatch reports.
    fn db_seed(&self) -> u64 {
        match &self.source {
            DbSource::Synthetic(p) => p.seed,
            DbSource::File(_) => self.seed,
        }
    }
}

/// Workload seed for one query length, so adding a length to the config
/// does not change the queries drawn for the others.
pub fn workload_seed(seed: u64, length: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (length as u64).wrapping_mul(0xD1B5_4A32_D192_ED03)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PreprocessingReport {
    pub transactions: usize,
    pub items: usize,
    pub avg_len: f64,
    /// Transactions per item.
    pub density: f64,
    pub tidset_build_ns: Option<u64>,
    pub tidset_total_tids: Option<u64>,
    pub pitree_build_ns: Option<u64>,
    pub pitree_nodes: Option<usize>,
}

fn nanos_since(start: Instant) -> u64 {
    start.elapsed().as_nanos().min(u64::MAX as u128) as u64
}

/// Times the index builds `engines` need and reports their sizes.
pub fn run_preprocessing_bench(
    db: &TransactionDatabase,
    engines: &[EngineKind],
) -> Result<PreprocessingReport, BenchError> {
    if engines.is_empty() {
        return Err(BenchError::NoEngines);
    }
    let mut report = PreprocessingReport {
        transactions: db.len(),
        items: db.num_items(),
        avg_len: db.avg_len(),
        density: db.density(),
        tidset_build_ns: None,
        tidset_total_tids: None,
        pitree_build_ns: None,
        pitree_nodes: None,
    };
    if engines.iter().any(|e| e.uses_tidsets()) {
        let start = Instant::now();
        let idx = TidSetIndex::build(db);
        report.tidset_build_ns = Some(nanos_since(start));
        report.tidset_total_tids = Some(idx.total_tids());
    }
    if engines.iter().any(|e| e.uses_pitree()) {
        let start = Instant::now();
        let order = crate::model::RankOrder::build(db);
        let tree = PiTree::build(db, &order);
        report.pitree_build_ns = Some(nanos_since(start));
        report.pitree_nodes = Some(tree.node_count());
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub engine: String,
    pub length: usize,
    pub queries: usize,
    pub mean_ns: f64,
    pub median_ns: f64,
    pub mean_work: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryBench {
    /// One row per length × query × engine, in that nesting order.
    pub rows: Vec<BenchRow>,
    pub summary: Vec<SummaryRow>,
}

impl QueryBench {
    pub fn summary_for(&self, engine: EngineKind, length: usize) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|s| s.engine == engine.name() && s.length == length)
    }
}

fn render(db: &TransactionDatabase, r: &TopKResult) -> String {
    r.to_tokens(db)
        .iter()
        .map(|(t, c)| format!("{t}:{c}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn result_entries(db: &TransactionDatabase, r: &TopKResult) -> Vec<ResultEntry> {
    r.to_tokens(db)
        .into_iter()
        .map(|(item, count)| ResultEntry { item, count })
        .collect()
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

fn median(mut xs: Vec<u64>) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_unstable();
    let mid = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[mid] as f64
    } else {
        (xs[mid - 1] as f64 + xs[mid] as f64) / 2.0
    }
}

/// Drops query items one at a time while `reference` and `engine` still
/// disagree, giving the smallest failing query reachable that way.
fn shrink_mismatch(
    index: &CoOccurrenceIndex,
    reference: EngineKind,
    engine: EngineKind,
    q: &Query,
) -> Query {
    let mut current = q.clone();
    'outer: while current.len() > 1 {
        for skip in 0..current.len() {
            let items: Vec<_> = current
                .items()
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &it)| it)
                .collect();
            let Ok(smaller) = Query::new(items, current.k(), index.order()) else {
                continue;
            };
            if index.run(reference, &smaller).result != index.run(engine, &smaller).result {
                current = smaller;
                continue 'outer;
            }
        }
        break;
    }
    current
}

fn mismatch(
    index: &CoOccurrenceIndex,
    reference: EngineKind,
    engine: EngineKind,
    q: &Query,
    seed: u64,
) -> BenchError {
    let q = shrink_mismatch(index, reference, engine, q);
    let db = index.db();
    BenchError::Mismatch(Box::new(Mismatch {
        reference: reference.name().to_owned(),
        engine: engine.name().to_owned(),
        query: db.tokens(q.items()).map(str::to_owned).collect(),
        k: q.k(),
        seed,
        expected: render(db, &index.run(reference, &q).result),
        actual: render(db, &index.run(engine, &q).result),
    }))
}

/// Loads the configured database, builds the needed indexes and runs the
/// workload.
pub fn run_query_bench(config: &BenchConfig) -> Result<QueryBench, BenchError> {
    config.validate()?;
    let db = config.source.load()?;
    let index = CoOccurrenceIndex::build_for(db, &config.engines);
    bench_queries(&index, config)
}

/// Runs the workload against an already built index; `config.source` is
/// only used for the reproducer seed.
pub fn bench_queries(
    index: &CoOccurrenceIndex,
    config: &BenchConfig,
) -> Result<QueryBench, BenchError> {
    config.validate()?;
    let db = index.db();
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &length in &config.query_lengths {
        let workload = generate_queries(
            db,
            length,
            config.queries_per_length,
            workload_seed(config.seed, length),
        )?;
        let queries: Vec<Option<Query>> = workload
            .queries
            .iter()
            .map(|tokens| index.canonicalize(tokens, config.k))
            .collect::<Result<_, _>>()?;

        // engine-major so each engine's queries run back to back
        let mut measured: Vec<Vec<(u64, QueryOutcome)>> = Vec::with_capacity(config.engines.len());
        for &engine in &config.engines {
            if let Some(Some(first)) = queries.first() {
                for _ in 0..config.warmup {
                    std::hint::black_box(index.run(engine, first));
                }
            }
            let mut per_query = Vec::with_capacity(queries.len());
            for q in &queries {
                let start = Instant::now();
                let outcome = match q {
                    Some(q) => index.run(engine, q),
                    None => QueryOutcome::empty(),
                };
                let elapsed = nanos_since(start);
                per_query.push((elapsed, outcome));
            }
            measured.push(per_query);
        }

        let reference = config.engines[0];
        for (qi, tokens) in workload.queries.iter().enumerate() {
            let expected = &measured[0][qi].1.result;
            for (ei, &engine) in config.engines.iter().enumerate() {
                let (elapsed_ns, outcome) = &measured[ei][qi];
                if &outcome.result != expected {
                    let q = queries[qi].as_ref().expect("empty outcomes always agree");
                    return Err(mismatch(index, reference, engine, q, config.db_seed()));
                }
                rows.push(BenchRow {
                    engine: engine.name().to_owned(),
                    query_tokens: tokens.clone(),
                    k: config.k,
                    elapsed_ns: *elapsed_ns,
                    result: result_entries(db, &outcome.result),
                    visited: outcome.work,
                });
            }
        }

        for (ei, &engine) in config.engines.iter().enumerate() {
            let m = &measured[ei];
            summary.push(SummaryRow {
                engine: engine.name().to_owned(),
                length,
                queries: m.len(),
                mean_ns: mean(m.iter().map(|(t, _)| *t as f64)),
                median_ns: median(m.iter().map(|(t, _)| *t).collect()),
                mean_work: mean(m.iter().map(|(_, o)| o.work as f64)),
            });
        }
    }
    Ok(QueryBench { rows, summary })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleRow {
    pub multiplier: usize,
    pub transactions: usize,
    pub engine: String,
    pub mean_ns: f64,
    /// Mean latency relative to the unscaled database.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScaleConfig {
    pub base: SyntheticParams,
    pub multipliers: Vec<usize>,
    pub engines: Vec<EngineKind>,
    pub length: usize,
    pub k: usize,
    pub queries: usize,
    pub seed: u64,
    pub warmup: usize,
}

/// Regenerates the database with `n_transactions` scaled by each
/// multiplier and reports per-engine mean latency as a ratio of the
/// multiplier-1 mean. An empty multiplier list yields an empty table.
pub fn run_scalability_sweep(config: &ScaleConfig) -> Result<Vec<ScaleRow>, BenchError> {
    if config.multipliers.contains(&0) {
        return Err(BenchError::InvalidMultiplier);
    }
    if config.multipliers.is_empty() {
        return Ok(Vec::new());
    }
    let means_at = |multiplier: usize| -> Result<(usize, Vec<f64>), BenchError> {
        let bench = BenchConfig {
            source: DbSource::Synthetic(config.base.scaled(multiplier)),
            engines: config.engines.clone(),
            query_lengths: vec![config.length],
            queries_per_length: config.queries,
            k: config.k,
            seed: config.seed,
            warmup: config.warmup,
        };
        bench.validate()?;
        let db = bench.source.load()?;
        let transactions = db.len();
        let index = CoOccurrenceIndex::build_for(db, &bench.engines);
        let result = bench_queries(&index, &bench)?;
        Ok((
            transactions,
            result.summary.iter().map(|s| s.mean_ns).collect(),
        ))
    };

    let base = means_at(1)?;
    let mut rows = Vec::new();
    for &multiplier in &config.multipliers {
        let (transactions, means) = if multiplier == 1 {
            base.clone()
        } else {
            means_at(multiplier)?
        };
        for (ei, &engine) in config.engines.iter().enumerate() {
            let ratio = if multiplier == 1 {
                1.0
            } else if base.1[ei] > 0.0 {
                means[ei] / base.1[ei]
            } else {
                f64::NAN
            };
            rows.push(ScaleRow {
                multiplier,
                transactions,
                engine: engine.name().to_owned(),
                mean_ns: means[ei],
                ratio,
            });
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifySummary {
    pub queries_checked: usize,
    pub engine_runs: usize,
    /// Lengths longer than every transaction, skipped rather than failed.
    pub skipped_lengths: Vec<usize>,
}

/// Checks every engine against the brute-force oracle on random workloads.
pub fn verify_against_oracle(
    index: &CoOccurrenceIndex,
    engines: &[EngineKind],
    lengths: &[usize],
    queries: usize,
    k: usize,
    seed: u64,
) -> Result<VerifySummary, BenchError> {
    if engines.is_empty() {
        return Err(BenchError::NoEngines);
    }
    if lengths.is_empty() || lengths.contains(&0) {
        return Err(BenchError::InvalidLengths);
    }
    let db = index.db();
    let mut summary = VerifySummary::default();
    for &length in lengths {
        let workload = match generate_queries(db, length, queries, workload_seed(seed, length)) {
            Ok(w) => w,
            Err(DatasetError::WorkloadInfeasible { .. }) => {
                summary.skipped_lengths.push(length);
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        for tokens in &workload.queries {
            let Some(q) = index.canonicalize(tokens, k)? else {
                continue;
            };
            let expected = oracle_topk(db, index.order(), &q);
            for &engine in engines {
                let actual = index.run(engine, &q).result;
                if actual != expected {
                    return Err(BenchError::Mismatch(Box::new(Mismatch {
                        reference: "oracle".to_owned(),
                        engine: engine.name().to_owned(),
                        query: tokens.clone(),
                        k,
                        seed,
                        expected: render(db, &expected),
                        actual: render(db, &actual),
                    })));
                }
                summary.engine_runs += 1;
            }
            summary.queries_checked += 1;
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::sample_db;

    fn dense() -> SyntheticParams {
        SyntheticParams {
            n_transactions: 2000,
            n_items: 60,
            avg_trans_len: 10.0,
            n_patterns: 5,
            avg_pattern_len: 7.0,
            correlation: 0.9,
            seed: 11,
        }
    }

    fn config(engines: Vec<EngineKind>) -> BenchConfig {
        BenchConfig {
            source: DbSource::Synthetic(dense()),
            engines,
            query_lengths: vec![3],
            queries_per_length: 10,
            k: 10,
            seed: 5,
            warmup: DEFAULT_WARMUP,
        }
    }

    #[test]
    fn preprocessing_on_sample_db() {
        let db = sample_db();
        let r = run_preprocessing_bench(&db, &EngineKind::ALL).unwrap();
        assert_eq!(r.pitree_nodes, Some(11));
        assert_eq!(r.tidset_total_tids, Some(19));
        assert!((r.density - 5.0 / 7.0).abs() < 1e-12);
        assert!(matches!(
            run_preprocessing_bench(&db, &[]),
            Err(BenchError::NoEngines)
        ));
        let r = run_preprocessing_bench(&db, &[EngineKind::Nt]).unwrap();
        assert_eq!(r.pitree_nodes, None);
        assert_eq!(r.tidset_total_tids, None);
    }

    #[test]
    fn rows_per_engine_and_query() {
        let bench = run_query_bench(&config(vec![EngineKind::Nti, EngineKind::Pt])).unwrap();
        assert_eq!(bench.rows.len(), 20);
        for pair in bench.rows.chunks(2) {
            assert_eq!(pair[0].engine, "nti");
            assert_eq!(pair[1].engine, "pt");
            assert_eq!(pair[0].query_tokens, pair[1].query_tokens);
            assert_eq!(pair[0].result, pair[1].result);
            assert_eq!(pair[0].query_tokens.len(), 3);
        }
        assert_eq!(bench.summary.len(), 2);
        let pt = bench.summary_for(EngineKind::Pt, 3).unwrap();
        let nti = bench.summary_for(EngineKind::Nti, 3).unwrap();
        assert!(pt.mean_work <= nti.mean_work);
    }

    #[test]
    fn all_engines_agree_and_repeat() {
        let cfg = BenchConfig {
            query_lengths: vec![1, 3, 5],
            ..config(EngineKind::ALL.to_vec())
        };
        let a = run_query_bench(&cfg).unwrap();
        let b = run_query_bench(&cfg).unwrap();
        assert_eq!(a.rows.len(), 3 * 10 * 6);
        let strip = |rows: &[BenchRow]| -> Vec<BenchRow> {
            rows.iter()
                .cloned()
                .map(|r| BenchRow { elapsed_ns: 0, ..r })
                .collect()
        };
        assert_eq!(strip(&a.rows), strip(&b.rows));
    }

    #[test]
    fn config_errors() {
        assert!(matches!(
            run_query_bench(&config(vec![])),
            Err(BenchError::NoEngines)
        ));
        let cfg = BenchConfig {
            query_lengths: vec![0],
            ..config(vec![EngineKind::Nt])
        };
        assert!(matches!(
            run_query_bench(&cfg),
            Err(BenchError::InvalidLengths)
        ));
        let cfg = BenchConfig {
            query_lengths: vec![500],
            ..config(vec![EngineKind::Nt])
        };
        assert!(matches!(
            run_query_bench(&cfg),
            Err(BenchError::Dataset(DatasetError::WorkloadInfeasible {
                length: 500
            }))
        ));
    }

    fn scale(multipliers: Vec<usize>) -> ScaleConfig {
        ScaleConfig {
            base: SyntheticParams {
                n_transactions: 300,
                ..dense()
            },
            multipliers,
            engines: vec![EngineKind::Nti, EngineKind::Pt],
            length: 5,
            k: 10,
            queries: 5,
            seed: 1,
            warmup: 1,
        }
    }

    #[test]
    fn scalability_sweep_shape() {
        let rows = run_scalability_sweep(&scale(vec![1, 2])).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows[..2]
            .iter()
            .all(|r| r.ratio == 1.0 && r.transactions == 300));
        assert!(rows[2..]
            .iter()
            .all(|r| r.multiplier == 2 && r.transactions == 600));
        assert!(run_scalability_sweep(&scale(vec![])).unwrap().is_empty());
        assert!(matches!(
            run_scalability_sweep(&scale(vec![0, 1])),
            Err(BenchError::InvalidMultiplier)
        ));
    }

    #[test]
    fn oracle_verification() {
        let db = generate_synthetic(&dense()).unwrap();
        let index = CoOccurrenceIndex::build(db);
        let s = verify_against_oracle(&index, &EngineKind::ALL, &[1, 2, 4, 40], 20, 5, 3).unwrap();
        assert_eq!(s.queries_checked, 60);
        assert_eq!(s.engine_runs, 360);
        assert_eq!(s.skipped_lengths, vec![40]);
    }
}

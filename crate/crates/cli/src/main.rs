use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use cooc::bench::{
    run_preprocessing_bench, run_scalability_sweep, verify_against_oracle, BenchConfig, DbSource,
    ScaleConfig, ScaleRow, DEFAULT_WARMUP,
};
use cooc::dataset::{load_fimi, save_fimi, write_fimi};
use cooc::oracle::oracle_topk;
use cooc::report::{write_report, BenchRow, ReportFormat, ResultEntry};
use cooc::synth::{generate_synthetic, SyntheticParams};
use cooc::{CoOccurrenceIndex, EngineKind, PiTree, QueryOutcome, RankOrder};

#[derive(Parser)]
#[command(name = "cooc", version, about = "Top-k co-occurrence item queries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic transaction database.
    Gen(GenArgs),
    /// Print database and index statistics.
    Stats {
        #[arg(long)]
        db: PathBuf,
    },
    /// Answer one top-k query.
    Query(QueryArgs),
    /// Time engines on random query workloads.
    Bench(BenchArgs),
    /// Measure latency growth as the database is scaled up.
    Scale(ScaleArgs),
    /// Cross-check every engine against the brute-force oracle.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    trans: usize,
    #[arg(long)]
    items: usize,
    #[arg(long = "avg-len")]
    avg_len: f64,
    #[arg(long)]
    patterns: usize,
    #[arg(long = "pattern-len")]
    pattern_len: f64,
    #[arg(long)]
    corr: f64,
    #[arg(long)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    db: PathBuf,
    /// One of nt, nt-ta, nti, nti-ta, pt, pt-ta, oracle.
    #[arg(long)]
    engine: String,
    /// Comma-separated query tokens, e.g. "a,c".
    #[arg(long)]
    itemset: String,
    #[arg(short)]
    k: usize,
    #[arg(long, default_value = "json", value_parser = parse_format)]
    format: ReportFormat,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(
        long,
        conflicts_with = "synthetic",
        required_unless_present = "synthetic"
    )]
    db: Option<PathBuf>,
    /// Synthetic parameters, e.g. "trans=100000,items=200,avg-len=10,patterns=10,pattern-len=8,corr=0.9".
    #[arg(long)]
    synthetic: Option<String>,
    #[arg(long, default_value = "all", value_parser = parse_engines)]
    engines: EngineList,
    #[arg(long, default_value = "3..7", value_parser = parse_lengths)]
    lengths: NumberList,
    #[arg(long, default_value_t = 100)]
    queries: usize,
    #[arg(short, default_value_t = 10)]
    k: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_WARMUP)]
    warmup: usize,
    /// Report file; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "jsonl", value_parser = parse_format)]
    format: ReportFormat,
}

#[derive(Args)]
struct ScaleArgs {
    #[arg(long)]
    base: String,
    #[arg(long, default_value = "1,2,3,4,5", value_parser = parse_lengths)]
    mult: NumberList,
    #[arg(long, default_value = "nti,pt", value_parser = parse_engines)]
    engines: EngineList,
    #[arg(long, default_value_t = 5)]
    length: usize,
    #[arg(short, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 100)]
    queries: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_WARMUP)]
    warmup: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "jsonl", value_parser = parse_format)]
    format: ReportFormat,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    db: PathBuf,
    #[arg(long, default_value_t = 100)]
    queries: usize,
    #[arg(long, default_value = "1..7", value_parser = parse_lengths)]
    lengths: NumberList,
    #[arg(short, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value = "all", value_parser = parse_engines)]
    engines: EngineList,
    #[arg(long)]
    seed: u64,
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse()
}

#[derive(Clone, Debug)]
struct EngineList(Vec<EngineKind>);

#[derive(Clone, Debug)]
struct NumberList(Vec<usize>);

fn parse_engines(s: &str) -> Result<EngineList, String> {
    if s == "all" {
        return Ok(EngineList(EngineKind::ALL.to_vec()));
    }
    s.split(',')
        .map(|e| e.trim().parse())
        .collect::<Result<_, _>>()
        .map(EngineList)
}

/// Accepts an inclusive range `3..7` or a list `3,5`.
fn parse_lengths(s: &str) -> Result<NumberList, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|e| format!("bad number {t:?}: {e}"))
    };
    if let Some((lo, hi)) = s.split_once("..") {
        let (lo, hi) = (num(lo)?, num(hi.trim_start_matches('='))?);
        if lo > hi {
            return Err(format!("empty range {s:?}"));
        }
        return Ok(NumberList((lo..=hi).collect()));
    }
    s.split(',')
        .map(num)
        .collect::<Result<_, _>>()
        .map(NumberList)
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            Box::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)
        }
        None => Box::new(io::stdout().lock()),
    })
}

/// Fills in `seed` from the command line when the parameter string has none.
fn synthetic_params(text: &str, seed: u64) -> Result<SyntheticParams> {
    let mut params: SyntheticParams = text
        .parse()
        .map_err(|e| anyhow::anyhow!("--synthetic/--base: {e}"))?;
    if !text.split(',').any(|p| p.trim().starts_with("seed=")) {
        params.seed = seed;
    }
    Ok(params)
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let params = SyntheticParams {
        n_transactions: args.trans,
        n_items: args.items,
        avg_trans_len: args.avg_len,
        n_patterns: args.patterns,
        avg_pattern_len: args.pattern_len,
        correlation: args.corr,
        seed: args.seed,
    };
    let db = generate_synthetic(&params)?;
    match &args.output {
        Some(path) => save_fimi(&db, path)?,
        None => write_fimi(&db, io::stdout().lock())?,
    }
    eprintln!(
        "generated {} transactions over {} items (avg length {:.2})",
        db.len(),
        db.num_items(),
        db.avg_len()
    );
    Ok(())
}

fn cmd_stats(db_path: &Path) -> Result<()> {
    let db = load_fimi(db_path)?;
    let pre = run_preprocessing_bench(&db, &EngineKind::ALL)?;
    let tree = PiTree::build(&db, &RankOrder::build(&db));
    let shape = tree.stats();
    let mut out = io::stdout().lock();
    writeln!(out, "transactions\t{}", pre.transactions)?;
    writeln!(out, "items\t{}", pre.items)?;
    writeln!(out, "avg_len\t{:.4}", pre.avg_len)?;
    writeln!(out, "max_len\t{}", db.max_len())?;
    writeln!(out, "density\t{:.4}", pre.density)?;
    writeln!(
        out,
        "tidset_total_tids\t{}",
        pre.tidset_total_tids.unwrap_or(0)
    )?;
    writeln!(out, "tidset_build_ns\t{}", pre.tidset_build_ns.unwrap_or(0))?;
    writeln!(out, "pitree_nodes\t{}", shape.nodes)?;
    writeln!(out, "pitree_leaves\t{}", shape.leaves)?;
    writeln!(out, "pitree_root_children\t{}", shape.root_children)?;
    writeln!(out, "pitree_max_depth\t{}", shape.max_depth)?;
    writeln!(out, "pitree_build_ns\t{}", pre.pitree_build_ns.unwrap_or(0))?;
    Ok(())
}

fn cmd_query(args: QueryArgs) -> Result<()> {
    let tokens: Vec<&str> = args
        .itemset
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .collect();
    let db = load_fimi(&args.db)?;
    let (engine_name, engines) = if args.engine == "oracle" {
        ("oracle", Vec::new())
    } else {
        let kind: EngineKind = args.engine.parse().map_err(anyhow::Error::msg)?;
        (kind.name(), vec![kind])
    };
    let index = CoOccurrenceIndex::build_for(db, &engines);
    let query = index.canonicalize(&tokens, args.k)?;
    let start = Instant::now();
    let outcome = match (&query, engines.first()) {
        (None, _) => QueryOutcome::empty(),
        (Some(q), Some(&kind)) => index.run(kind, q),
        (Some(q), None) => QueryOutcome {
            result: oracle_topk(index.db(), index.order(), q),
            work: index.db().len() as u64,
            early_exit: None,
        },
    };
    let elapsed_ns = start.elapsed().as_nanos() as u64;
    let row = BenchRow {
        engine: engine_name.to_owned(),
        query_tokens: tokens.iter().map(|t| t.to_string()).collect(),
        k: args.k,
        elapsed_ns,
        result: outcome
            .result
            .to_tokens(index.db())
            .into_iter()
            .map(|(item, count)| ResultEntry { item, count })
            .collect(),
        visited: outcome.work,
    };
    write_report(&[row], io::stdout().lock(), args.format)?;
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let source = match (&args.db, &args.synthetic) {
        (Some(path), _) => DbSource::File(path.clone()),
        (None, Some(spec)) => DbSource::Synthetic(synthetic_params(spec, args.seed)?),
        (None, None) => bail!("one of --db or --synthetic is required"),
    };
    let config = BenchConfig {
        source,
        engines: args.engines.0,
        query_lengths: args.lengths.0,
        queries_per_length: args.queries,
        k: args.k,
        seed: args.seed,
        warmup: args.warmup,
    };
    config.validate()?;
    let db = config.source.load()?;
    let pre = run_preprocessing_bench(&db, &config.engines)?;
    eprintln!("preprocessing: {}", serde_json::to_string(&pre)?);
    let index = CoOccurrenceIndex::build_for(db, &config.engines);
    let bench = cooc::bench::bench_queries(&index, &config)?;
    write_report(
        &bench.rows,
        open_output(args.output.as_deref())?,
        args.format,
    )?;
    eprintln!("engine\tlength\tqueries\tmean_ns\tmedian_ns\tmean_work");
    for s in &bench.summary {
        eprintln!(
            "{}\t{}\t{}\t{:.0}\t{:.0}\t{:.1}",
            s.engine, s.length, s.queries, s.mean_ns, s.median_ns, s.mean_work
        );
    }
    Ok(())
}

fn write_scale_rows(rows: &[ScaleRow], mut out: impl Write, format: ReportFormat) -> Result<()> {
    match format {
        ReportFormat::JsonLines => {
            for row in rows {
                serde_json::to_writer(&mut out, row)?;
                writeln!(out)?;
            }
        }
        ReportFormat::Tsv => {
            writeln!(out, "multiplier\ttransactions\tengine\tmean_ns\tratio")?;
            for r in rows {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{:.0}\t{:.4}",
                    r.multiplier, r.transactions, r.engine, r.mean_ns, r.ratio
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_scale(args: ScaleArgs) -> Result<()> {
    let config = ScaleConfig {
        base: synthetic_params(&args.base, args.seed)?,
        multipliers: args.mult.0,
        engines: args.engines.0,
        length: args.length,
        k: args.k,
        queries: args.queries,
        seed: args.seed,
        warmup: args.warmup,
    };
    let rows = run_scalability_sweep(&config)?;
    write_scale_rows(&rows, open_output(args.output.as_deref())?, args.format)
}

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    let db = load_fimi(&args.db)?;
    let index = CoOccurrenceIndex::build(db);
    let summary = verify_against_oracle(
        &index,
        &args.engines.0,
        &args.lengths.0,
        args.queries,
        args.k,
        args.seed,
    )?;
    for length in &summary.skipped_lengths {
        eprintln!("skipped length {length}: no transaction is that long");
    }
    println!(
        "ok: {} queries, {} engine runs, all matching the oracle",
        summary.queries_checked, summary.engine_runs
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Stats { db } => cmd_stats(&db),
        Command::Query(args) => cmd_query(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Scale(args) => cmd_scale(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

//! Synthetic transaction databases and random query workloads.
//!
//! The generator follows the usual market-basket recipe: a pool of seed
//! patterns drawn from a skewed item popularity, transactions assembled
//! from weighted patterns with per-item dropout, topped up with popular
//! random items. Few patterns and high `correlation` give dense databases
//! whose prefix trees compress well.

use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{weighted::WeightedIndex, Distribution, Exp1, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::DatasetError;
use crate::model::TransactionDatabase;

/// Item popularity falls off as `exp(-POPULARITY_DECAY * rank / n_items)`.
const POPULARITY_DECAY: f64 = 5.0;
/// Pattern draws in a row that add nothing before falling back to padding.
const MAX_STALLS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticParams {
    pub n_transactions: usize,
    pub n_items: usize,
    pub avg_trans_len: f64,
    pub n_patterns: usize,
    pub avg_pattern_len: f64,
    /// Probability that each item of a chosen pattern is kept.
    pub correlation: f64,
    pub seed: u64,
}

/// False for NaN as well as for values below one.
fn at_least_one(x: f64) -> bool {
    x >= 1.0
}

impl SyntheticParams {
    pub fn validate(&self) -> Result<(), DatasetError> {
        let bad = |msg: &str| Err(DatasetError::InvalidParams(msg.to_owned()));
        if self.n_transactions < 1 || self.n_items < 1 || self.n_patterns < 1 {
            return bad("transaction, item and pattern counts must be at least 1");
        }
        if !at_least_one(self.avg_trans_len) || !at_least_one(self.avg_pattern_len) {
            return bad("average lengths must be at least 1");
        }
        if self.avg_pattern_len > self.avg_trans_len {
            return bad("average pattern length cannot exceed average transaction length");
        }
        if !(0.0..=1.0).contains(&self.correlation) {
            return bad("correlation must lie in [0, 1]");
        }
        Ok(())
    }

    /// Same parameters with `n_transactions` multiplied by `factor`.
    pub fn scaled(&self, factor: usize) -> Self {
        Self {
            n_transactions: self.n_transactions * factor,
            ..self.clone()
        }
    }
}

impl fmt::Display for SyntheticParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "trans={},items={},avg-len={},patterns={},pattern-len={},corr={},seed={}",
            self.n_transactions,
            self.n_items,
            self.avg_trans_len,
            self.n_patterns,
            self.avg_pattern_len,
            self.correlation,
            self.seed
        )
    }
}

/// Parses `key=value` pairs separated by commas, e.g.
/// `trans=100000,items=200,avg-len=10,patterns=10,pattern-len=8,corr=0.9`.
/// `seed` is optional and defaults to 0.
impl FromStr for SyntheticParams {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut trans = None;
        let mut items = None;
        let mut avg_len = None;
        let mut patterns = None;
        let mut pattern_len = None;
        let mut corr = None;
        let mut seed = 0u64;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got {part:?}"))?;
            let err = |e: &dyn fmt::Display| format!("bad value for {key}: {e}");
            match key.trim() {
                "trans" => trans = Some(value.parse().map_err(|e| err(&e))?),
                "items" => items = Some(value.parse().map_err(|e| err(&e))?),
                "avg-len" => avg_len = Some(value.parse().map_err(|e| err(&e))?),
                "patterns" => patterns = Some(value.parse().map_err(|e| err(&e))?),
                "pattern-len" => pattern_len = Some(value.parse().map_err(|e| err(&e))?),
                "corr" => corr = Some(value.parse().map_err(|e| err(&e))?),
                "seed" => seed = value.parse().map_err(|e| err(&e))?,
                other => return Err(format!("unknown parameter {other:?}")),
            }
        }
        let need = |name: &str| format!("missing parameter {name}");
        Ok(Self {
            n_transactions: trans.ok_or_else(|| need("trans"))?,
            n_items: items.ok_or_else(|| need("items"))?,
            avg_trans_len: avg_len.ok_or_else(|| need("avg-len"))?,
            n_patterns: patterns.ok_or_else(|| need("patterns"))?,
            avg_pattern_len: pattern_len.ok_or_else(|| need("pattern-len"))?,
            correlation: corr.ok_or_else(|| need("corr"))?,
            seed,
        })
    }
}

fn poisson_at_least_one<R: Rng>(rng: &mut R, mean: f64, cap: usize) -> usize {
    let draw: f64 = Poisson::new(mean)
        .expect("mean validated positive")
        .sample(rng);
    (draw as usize).clamp(1, cap)
}

/// Generates a database deterministically from `params.seed`. Item tokens
/// are the decimal integers `0..n_items`, `0` being the most popular.
pub fn generate_synthetic(params: &SyntheticParams) -> Result<TransactionDatabase, DatasetError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n_items = params.n_items;

    let popularity: Vec<f64> = (0..n_items)
        .map(|j| (-POPULARITY_DECAY * j as f64 / n_items as f64).exp())
        .collect();
    let item_pick = WeightedIndex::new(&popularity).expect("positive weights");
    let all_items: Vec<u32> = (0..n_items as u32).collect();

    let patterns: Vec<Vec<u32>> = (0..params.n_patterns)
        .map(|_| {
            let size = poisson_at_least_one(&mut rng, params.avg_pattern_len, n_items);
            all_items
                .choose_multiple_weighted(&mut rng, size, |&j| popularity[j as usize])
                .expect("positive weights")
                .copied()
                .collect()
        })
        .collect();
    let pattern_weights: Vec<f64> = (0..params.n_patterns)
        .map(|_| {
            let w: f64 = Exp1.sample(&mut rng);
            w.max(f64::MIN_POSITIVE)
        })
        .collect();
    let pattern_pick = WeightedIndex::new(&pattern_weights).expect("positive weights");

    let mut present = vec![false; n_items];
    let mut rows: Vec<Vec<String>> = Vec::with_capacity(params.n_transactions);
    let mut tx: Vec<u32> = Vec::new();
    for _ in 0..params.n_transactions {
        let target = poisson_at_least_one(&mut rng, params.avg_trans_len, n_items);
        tx.clear();
        let mut stalls = 0;
        let mut first = true;
        while tx.len() < target && stalls < MAX_STALLS {
            let pattern = &patterns[pattern_pick.sample(&mut rng)];
            let before = tx.len();
            for &item in pattern {
                // the first pattern goes in whole; later ones only fill up
                let keep = rng.random_bool(params.correlation);
                if keep && !present[item as usize] && (first || tx.len() < target) {
                    present[item as usize] = true;
                    tx.push(item);
                }
            }
            first = false;
            if tx.len() == before {
                stalls += 1;
            }
        }
        while tx.len() < target {
            let item = item_pick.sample(&mut rng);
            if !present[item] {
                present[item] = true;
                tx.push(item as u32);
            }
        }
        for &item in &tx {
            present[item as usize] = false;
        }
        rows.push(tx.iter().map(u32::to_string).collect());
    }
    Ok(TransactionDatabase::from_rows(rows))
}

/// Random query itemsets, each a subset of some transaction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryWorkload {
    pub queries: Vec<Vec<String>>,
    pub length: usize,
    pub seed: u64,
}

/// Draws `count` queries of `length` distinct items: pick a random
/// transaction (redrawing ones that are too short), then pick `length` of
/// its items.
pub fn generate_queries(
    db: &TransactionDatabase,
    length: usize,
    count: usize,
    seed: u64,
) -> Result<QueryWorkload, DatasetError> {
    if length < 1 {
        return Err(DatasetError::InvalidQueryLength);
    }
    if db.is_empty() {
        return Err(DatasetError::EmptyDatabase);
    }
    if db.max_len() < length {
        return Err(DatasetError::WorkloadInfeasible { length });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = db.len() as u32;
    let mut queries = Vec::with_capacity(count);
    for _ in 0..count {
        let t = loop {
            let tid = rng.random_range(1..=n);
            let t = db.transaction(tid).expect("tid in range");
            if t.len() >= length {
                break t;
            }
        };
        let mut picked: Vec<_> = t.choose_multiple(&mut rng, length).copied().collect();
        picked.sort_unstable();
        queries.push(db.tokens(&picked).map(str::to_owned).collect());
    }
    Ok(QueryWorkload {
        queries,
        length,
        seed,
    })
}

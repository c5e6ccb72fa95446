#![allow(dead_code)]

use cooc::{Query, RankOrder, TransactionDatabase};
use rand::seq::IndexedRandom;
use rand::Rng;

pub const SAMPLE_DB: &str = "b f g\na b c f\na c d f\nb c e\na c d e f\n";

pub fn sample_db() -> TransactionDatabase {
    TransactionDatabase::from_rows(SAMPLE_DB.lines().map(str::split_whitespace))
}

/// Random database with `1..=max_n` transactions over `2..=25` items at one
/// of several densities.
pub fn random_db<R: Rng>(rng: &mut R, max_n: usize) -> TransactionDatabase {
    let n = rng.random_range(1..=max_n);
    let m = rng.random_range(2..=25);
    let p = *[0.05, 0.2, 0.5, 0.8, 0.95].choose(rng).unwrap();
    let rows: Vec<Vec<String>> = (0..n)
        .map(|_| {
            (0..m)
                .filter(|_| rng.random_bool(p))
                .map(|i| format!("i{i}"))
                .collect()
        })
        .collect();
    let db = TransactionDatabase::from_rows(rows);
    if db.is_empty() {
        TransactionDatabase::from_rows([["i0", "i1"]])
    } else {
        db
    }
}

/// Random query of 1..=6 items. Half the time it is drawn from one
/// transaction so it is guaranteed to have support.
pub fn random_query<R: Rng>(rng: &mut R, db: &TransactionDatabase, order: &RankOrder) -> Query {
    let m = db.num_items();
    let k = rng.random_range(1..=m.max(1));
    let len = rng.random_range(1..=6usize.min(m));
    let items = if rng.random_bool(0.5) {
        let tid = rng.random_range(1..=db.len() as u32);
        let t = db.transaction(tid).unwrap();
        t.choose_multiple(rng, len.min(t.len())).copied().collect()
    } else {
        order.order().choose_multiple(rng, len).copied().collect()
    };
    Query::new(items, k, order).unwrap()
}

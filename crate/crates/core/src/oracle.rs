//! Brute-force reference answers, computed straight from the definitions
//! with per-transaction bitset subset tests. Used as ground truth by the
//! equivalence tests and the `verify` command; shares no counting code with
//! the engines.

use crate::model::{
    finalize_topk, CoCountTable, ItemId, Query, RankOrder, TopKResult, TransactionDatabase,
};

struct Bits {
    words: Vec<u64>,
}

impl Bits {
    fn new(bits: usize) -> Self {
        Self {
            words: vec![0; bits.div_ceil(64)],
        }
    }

    fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    fn set(&mut self, bit: usize) {
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    fn is_subset_of(&self, other: &Bits) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }
}

/// `count[i] = |{T : P ∪ {i} ⊆ T}|` for every item `i` outside `P`.
pub fn oracle_co_counts(db: &TransactionDatabase, q: &Query) -> CoCountTable {
    let m = db.num_items();
    let mut query = Bits::new(m);
    for i in q.items() {
        query.set(i.index());
    }
    let mut table = CoCountTable::new();
    let mut row = Bits::new(m);
    for (_, t) in db.iter() {
        row.clear();
        for i in t {
            row.set(i.index());
        }
        if !query.is_subset_of(&row) {
            continue;
        }
        for (w, (&r, &p)) in row.words.iter().zip(&query.words).enumerate() {
            let mut extra = r & !p;
            while extra != 0 {
                let bit = extra.trailing_zeros() as usize;
                table.add(ItemId((w * 64 + bit) as u32), 1);
                extra &= extra - 1;
            }
        }
    }
    table
}

pub fn oracle_topk(db: &TransactionDatabase, order: &RankOrder, q: &Query) -> TopKResult {
    finalize_topk(&oracle_co_counts(db, q), q.k(), order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;

    fn table(db: &TransactionDatabase, v: &[(&str, u32)]) -> CoCountTable {
        v.iter()
            .map(|&(t, c)| (db.dictionary().id(t).unwrap(), c))
            .collect()
    }

    #[test]
    fn sample_db_counts() {
        let db = sample_db();
        let order = RankOrder::build(&db);
        assert_eq!(
            oracle_co_counts(&db, &query(&db, &order, "ac", 1)),
            table(&db, &[("f", 3), ("d", 2), ("b", 1), ("e", 1)])
        );
        assert_eq!(
            oracle_co_counts(&db, &query(&db, &order, "c", 1)),
            table(&db, &[("a", 3), ("f", 3), ("b", 2), ("d", 2), ("e", 2)])
        );
        // the only transaction holding {b,f,g} has nothing else
        assert!(oracle_co_counts(&db, &query(&db, &order, "bfg", 1)).is_empty());
    }

    #[test]
    fn sample_db_topk() {
        let db = sample_db();
        let order = RankOrder::build(&db);
        let r = oracle_topk(&db, &order, &query(&db, &order, "ac", 2));
        assert_eq!(named(&db, &r), pairs(&[("f", 3), ("d", 2)]));
        let r = oracle_topk(&db, &order, &query(&db, &order, "c", 1));
        assert_eq!(named(&db, &r), pairs(&[("f", 3), ("a", 3)]));
        assert!(oracle_topk(&db, &order, &query(&db, &order, "ag", 3)).is_empty());
    }

    #[test]
    fn wide_item_space() {
        let rows: Vec<Vec<String>> = (0..3)
            .map(|r| {
                (0..150)
                    .filter(|i| i % (r + 2) == 0)
                    .map(|i| i.to_string())
                    .collect()
            })
            .collect();
        let db = TransactionDatabase::from_rows(rows);
        let order = RankOrder::build(&db);
        let q = Query::new(vec![db.dictionary().id("0").unwrap()], 1, &order).unwrap();
        let counts = oracle_co_counts(&db, &q);
        assert_eq!(counts.get(db.dictionary().id("12").unwrap()), 3);
        assert_eq!(counts.get(db.dictionary().id("148").unwrap()), 2);
    }
}

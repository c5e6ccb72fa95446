//! Inverted-list engines. Each item keeps the ascending list of transaction
//! ids that contain it; a query's projected database is the intersection of
//! its items' lists, and the naive machinery then runs over that subset.

use crate::engine::QueryOutcome;
use crate::model::{CoCountTable, ItemId, Query, RankOrder, Tid, TopKResult, TransactionDatabase};
use crate::naive::{scan_counts, ta_scan};
use crate::ta::{Checkpoint, TaConfig};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TidSetIndex {
    lists: Vec<Vec<Tid>>,
}

impl TidSetIndex {
    /// One pass over the database; lists come out ascending because tids
    /// are visited in order.
    pub fn build(db: &TransactionDatabase) -> Self {
        let mut lists: Vec<Vec<Tid>> = db
            .supports()
            .iter()
            .map(|&s| Vec::with_capacity(s as usize))
            .collect();
        for (tid, t) in db.iter() {
            for i in t {
                lists[i.index()].push(tid);
            }
        }
        Self { lists }
    }

    pub fn list(&self, item: ItemId) -> &[Tid] {
        &self.lists[item.index()]
    }

    pub fn num_items(&self) -> usize {
        self.lists.len()
    }

    /// Sum of list lengths; equals the total item occurrences.
    pub fn total_tids(&self) -> u64 {
        self.lists.iter().map(|l| l.len() as u64).sum()
    }

    /// Tids of the transactions containing every query item. Lists are
    /// folded shortest first.
    pub fn project(&self, q: &Query) -> Vec<Tid> {
        let mut lists: Vec<&[Tid]> = q.items().iter().map(|&i| self.list(i)).collect();
        lists.sort_by_key(|l| l.len());
        let (first, rest) = lists.split_first().expect("queries are non-empty");
        let mut acc = first.to_vec();
        let mut buf = Vec::with_capacity(acc.len());
        for l in rest {
            if acc.is_empty() {
                break;
            }
            intersect_into(&acc, l, &mut buf);
            std::mem::swap(&mut acc, &mut buf);
        }
        acc
    }
}

/// Linear-merge intersection of two strictly ascending sequences.
pub fn intersect(x: &[Tid], y: &[Tid]) -> Vec<Tid> {
    let mut out = Vec::with_capacity(x.len().min(y.len()));
    intersect_into(x, y, &mut out);
    out
}

fn intersect_into(x: &[Tid], y: &[Tid], out: &mut Vec<Tid>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(x[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

fn projected<'a>(
    db: &'a TransactionDatabase,
    tids: &'a [Tid],
) -> impl Iterator<Item = &'a [ItemId]> + 'a {
    tids.iter()
        .map(move |&tid| db.transaction(tid).expect("tid from this database"))
}

pub fn nti_co_counts(db: &TransactionDatabase, idx: &TidSetIndex, q: &Query) -> CoCountTable {
    let tids = idx.project(q);
    let (counts, _) = scan_counts(projected(db, &tids), q, db.num_items());
    CoCountTable::from_dense(&counts)
}

pub fn nti_query(
    db: &TransactionDatabase,
    idx: &TidSetIndex,
    order: &RankOrder,
    q: &Query,
) -> QueryOutcome {
    let tids = idx.project(q);
    let (counts, visited) = scan_counts(projected(db, &tids), q, db.num_items());
    QueryOutcome {
        result: TopKResult::select(
            counts
                .iter()
                .enumerate()
                .map(|(i, &c)| (ItemId(i as u32), c)),
            q.k(),
            order,
        ),
        work: visited,
        early_exit: None,
    }
}

pub fn nti_ta_query(
    db: &TransactionDatabase,
    idx: &TidSetIndex,
    order: &RankOrder,
    q: &Query,
    cfg: TaConfig,
) -> QueryOutcome {
    nti_ta_query_traced(db, idx, order, q, cfg, |_| {})
}

/// [`nti_ta_query`] with an observer called after every projected
/// transaction. The unvisited count starts at the projected size.
pub fn nti_ta_query_traced<F>(
    db: &TransactionDatabase,
    idx: &TidSetIndex,
    order: &RankOrder,
    q: &Query,
    cfg: TaConfig,
    observe: F,
) -> QueryOutcome
where
    F: FnMut(&Checkpoint<'_>),
{
    let tids = idx.project(q);
    ta_scan(projected(db, &tids), tids.len(), q, order, cfg, observe)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::naive::nt_query;
    use proptest::prelude::*;

    #[test]
    fn sample_db_lists() {
        let db = sample_db();
        let idx = TidSetIndex::build(&db);
        let id = |t: &str| db.dictionary().id(t).unwrap();
        assert_eq!(idx.list(id("a")), &[2, 3, 5]);
        assert_eq!(idx.list(id("g")), &[1]);
        assert_eq!(idx.list(id("c")), &[2, 3, 4, 5]);
        assert_eq!(idx.total_tids(), 19);
        for (i, &s) in db.supports().iter().enumerate() {
            assert_eq!(idx.list(ItemId(i as u32)).len(), s as usize);
        }
        let empty = TransactionDatabase::from_rows(Vec::<Vec<&str>>::new());
        assert_eq!(TidSetIndex::build(&empty).num_items(), 0);
    }

    #[test]
    fn intersect_examples() {
        assert_eq!(intersect(&[2, 3, 5], &[2, 3, 4, 5]), vec![2, 3, 5]);
        assert_eq!(intersect(&[2, 3, 5], &[]), Vec::<Tid>::new());
        assert_eq!(intersect(&[1, 4, 9], &[1, 4, 9]), vec![1, 4, 9]);
    }

    #[test]
    fn projection_examples() {
        let db = sample_db();
        let order = RankOrder::build(&db);
        let idx = TidSetIndex::build(&db);
        assert_eq!(idx.project(&query(&db, &order, "ac", 1)), vec![2, 3, 5]);
        assert_eq!(idx.project(&query(&db, &order, "c", 1)), vec![2, 3, 4, 5]);
        assert!(idx.project(&query(&db, &order, "ag", 1)).is_empty());
    }

    #[test]
    fn nti_examples() {
        let db = sample_db();
        let order = RankOrder::build(&db);
        let idx = TidSetIndex::build(&db);
        let out = nti_query(&db, &idx, &order, &query(&db, &order, "ac", 2));
        assert_eq!(named(&db, &out.result), pairs(&[("f", 3), ("d", 2)]));
        assert_eq!(out.work, 3);
        let out = nti_query(&db, &idx, &order, &query(&db, &order, "c", 2));
        assert_eq!(named(&db, &out.result), pairs(&[("f", 3), ("a", 3)]));

        let out = nti_ta_query(
            &db,
            &idx,
            &order,
            &query(&db, &order, "ac", 2),
            TaConfig::default(),
        );
        assert_eq!(named(&db, &out.result), pairs(&[("f", 3), ("d", 2)]));
        let out = nti_ta_query(
            &db,
            &idx,
            &order,
            &query(&db, &order, "ag", 2),
            TaConfig::default(),
        );
        assert!(out.result.is_empty());
        assert_eq!(out.work, 0);
    }

    #[test]
    fn nti_ta_terminates_early_on_projection() {
        let mut rows = vec![vec!["a", "b"]; 1000];
        rows.push(vec!["a", "c"]);
        rows.push(vec!["d"]);
        let db = TransactionDatabase::from_rows(rows);
        let order = RankOrder::build(&db);
        let idx = TidSetIndex::build(&db);
        let q = query(&db, &order, "a", 1);
        let out = nti_ta_query(&db, &idx, &order, &q, TaConfig::default());
        assert_eq!(out.result, nt_query(&db, &order, &q).result);
        assert!(out.early_exit.is_some());
        assert!(out.work < idx.project(&q).len() as u64);
    }

    proptest! {
        #[test]
        fn intersect_matches_membership(
            x in prop::collection::btree_set(0u32..200, 0..60),
            y in prop::collection::btree_set(0u32..200, 0..60),
        ) {
            let xs: Vec<Tid> = x.iter().copied().collect();
            let ys: Vec<Tid> = y.iter().copied().collect();
            let want: Vec<Tid> = xs.iter().copied().filter(|v| y.contains(v)).collect();
            prop_assert_eq!(intersect(&xs, &ys), want);
        }
    }
}

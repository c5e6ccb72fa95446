//! Full-scan engines: `nt` counts co-items in every containing transaction;
//! `nt-ta` does the same but stops admitting new candidates once the
//! threshold bound separates the top set from everything else.

use crate::engine::QueryOutcome;
use crate::model::{CoCountTable, ItemId, Query, RankOrder, TopKResult, TransactionDatabase};
use crate::ta::{Checkpoint, TaConfig, TaState};

/// Query membership test against one transaction.
pub(crate) struct Containment {
    mask: Vec<bool>,
    len: usize,
}

impl Containment {
    pub(crate) fn new(q: &Query, num_items: usize) -> Self {
        Self {
            mask: q.mask(num_items),
            len: q.len(),
        }
    }

    #[inline]
    pub(crate) fn in_query(&self, item: ItemId) -> bool {
        self.mask[item.index()]
    }

    #[inline]
    pub(crate) fn contains(&self, t: &[ItemId]) -> bool {
        t.len() >= self.len && t.iter().filter(|i| self.mask[i.index()]).count() == self.len
    }
}

/// Dense co-occurrence counts over `transactions`, plus how many were scanned.
pub(crate) fn scan_counts<'a, I>(transactions: I, q: &Query, num_items: usize) -> (Vec<u32>, u64)
where
    I: IntoIterator<Item = &'a [ItemId]>,
{
    let test = Containment::new(q, num_items);
    let mut counts = vec![0u32; num_items];
    let mut visited = 0u64;
    for t in transactions {
        visited += 1;
        if test.contains(t) {
            for &i in t {
                if !test.in_query(i) {
                    counts[i.index()] += 1;
                }
            }
        }
    }
    (counts, visited)
}

/// Threshold scan over `transactions`; `total` is how many the iterator
/// yields, so the unvisited count starts there.
pub(crate) fn ta_scan<'a, I, F>(
    transactions: I,
    total: usize,
    q: &Query,
    order: &RankOrder,
    cfg: TaConfig,
    mut observe: F,
) -> QueryOutcome
where
    I: IntoIterator<Item = &'a [ItemId]>,
    F: FnMut(&Checkpoint<'_>),
{
    let num_items = order.len();
    let test = Containment::new(q, num_items);
    let mut state = TaState::new(q.k(), num_items);
    let mut unvisited = total as u64;
    let mut visited = 0u64;
    let mut early_exit = None;
    let mut iter = transactions.into_iter();

    for t in iter.by_ref() {
        visited += 1;
        unvisited -= 1;
        if test.contains(t) {
            for &i in t {
                if !test.in_query(i) {
                    state.add(i, 1);
                }
            }
            state.refresh();
        }
        observe(&Checkpoint {
            state: &state,
            remaining: unvisited,
            step: visited,
        });
        // separating on the last transaction prunes nothing
        if unvisited > 0 && state.separated(unvisited) {
            early_exit = Some(state.snapshot(unvisited, visited));
            break;
        }
    }

    let result = match (&early_exit, cfg.finalize) {
        (None, _) => state.full_result(order),
        (Some(_), true) => {
            for t in iter {
                if test.contains(t) {
                    for &i in t {
                        state.add_if_top(i, 1);
                    }
                }
            }
            state.top_result(order, true)
        }
        (Some(_), false) => state.top_result(order, false),
    };
    QueryOutcome {
        result,
        work: visited,
        early_exit,
    }
}

/// Full co-occurrence table by scanning every transaction.
pub fn nt_co_counts(db: &TransactionDatabase, q: &Query) -> CoCountTable {
    let (counts, _) = scan_counts(db.iter().map(|(_, t)| t), q, db.num_items());
    CoCountTable::from_dense(&counts)
}

pub fn nt_query(db: &TransactionDatabase, order: &RankOrder, q: &Query) -> QueryOutcome {
    let (counts, visited) = scan_counts(db.iter().map(|(_, t)| t), q, db.num_items());
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

pub fn nt_ta_query(
    db: &TransactionDatabase,
    order: &RankOrder,
    q: &Query,
    cfg: TaConfig,
) -> QueryOutcome {
    nt_ta_query_traced(db, order, q, cfg, |_| {})
}

/// [`nt_ta_query`] with an observer called after every transaction.
pub fn nt_ta_query_traced<F>(
    db: &TransactionDatabase,
    order: &RankOrder,
    q: &Query,
    cfg: TaConfig,
    observe: F,
) -> QueryOutcome
where
    F: FnMut(&Checkpoint<'_>),
{
    ta_scan(db.iter().map(|(_, t)| t), db.len(), q, order, cfg, observe)
}

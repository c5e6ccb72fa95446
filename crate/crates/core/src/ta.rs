//! Threshold-style bound maintenance shared by the pruned engines.
//!
//! A [`TaState`] splits every item seen so far into the current top set
//! (tie-inclusive top-k of the partial counts) and the candidate set. The
//! lower bound is the k-th largest partial count in the top set (0 while
//! fewer than k items are known) and the candidate bound is the largest
//! partial count among candidates. Once `lower > max_candidate + remaining`,
//! where `remaining` caps what any item can still gain, no candidate can
//! reach the final top-k.

use crate::model::{ItemId, RankOrder, TopKResult};

/// Order in which the prefix-tree engine visits desirable nodes.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum NsOrder {
    /// Header node-link order.
    #[default]
    Discovery,
    /// Largest node count first; tightens the bound sooner.
    DescendingCount,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct TaConfig {
    /// After the bound separates, keep counting top-set members so the
    /// result carries exact counts. When false the result holds partial
    /// counts and `exact_counts` is false.
    pub finalize: bool,
    pub ns_order: NsOrder,
}

impl Default for TaConfig {
    fn default() -> Self {
        Self {
            finalize: true,
            ns_order: NsOrder::Discovery,
        }
    }
}

/// Snapshot taken when candidate admission stopped early.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EarlyExit {
    /// Top-set members at the moment the bound separated, ascending by id.
    pub top: Vec<ItemId>,
    pub lower_bound: u32,
    pub max_candidate: u32,
    pub remaining: u64,
    /// Work units (transactions or subtrees) consumed before the exit.
    pub step: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Slot {
    Unseen,
    Top,
    Candidate,
}

#[derive(Clone, Debug)]
pub struct TaState {
    k: usize,
    counts: Vec<u32>,
    slot: Vec<Slot>,
    top: Vec<ItemId>,
    // may contain items that were since promoted; `listed` prevents duplicates
    candidates: Vec<ItemId>,
    listed: Vec<bool>,
    min_top: u32,
    max_candidate: u32,
    max_dirty: bool,
    scratch: Vec<u32>,
}

impl TaState {
    pub(crate) fn new(k: usize, num_items: usize) -> Self {
        assert!(k >= 1, "k must be at least 1");
        Self {
            k,
            counts: vec![0; num_items],
            slot: vec![Slot::Unseen; num_items],
            top: Vec::new(),
            candidates: Vec::new(),
            listed: vec![false; num_items],
            min_top: 0,
            max_candidate: 0,
            max_dirty: false,
            scratch: Vec::new(),
        }
    }

    /// Adds `delta` to the partial count of `item` and updates membership.
    pub(crate) fn add(&mut self, item: ItemId, delta: u32) {
        let idx = item.index();
        let old = self.counts[idx];
        let new = old + delta;
        self.counts[idx] = new;
        match self.slot[idx] {
            Slot::Top => {
                // the k-th largest can only move if this item sat on it
                if old == self.min_top && self.top.len() >= self.k {
                    self.recompute_lower();
                }
            }
            Slot::Unseen | Slot::Candidate => {
                if new >= self.min_top {
                    if self.slot[idx] == Slot::Candidate && old == self.max_candidate {
                        self.max_dirty = true;
                    }
                    self.slot[idx] = Slot::Top;
                    self.top.push(item);
                    self.recompute_lower();
                } else {
                    self.make_candidate(item);
                }
            }
        }
    }

    /// Adds `delta` only if `item` is in the top set; membership is frozen.
    #[inline]
    pub(crate) fn add_if_top(&mut self, item: ItemId, delta: u32) {
        if self.slot[item.index()] == Slot::Top {
            self.counts[item.index()] += delta;
        }
    }

    fn make_candidate(&mut self, item: ItemId) {
        let idx = item.index();
        self.slot[idx] = Slot::Candidate;
        if !self.listed[idx] {
            self.listed[idx] = true;
            self.candidates.push(item);
        }
        if self.counts[idx] > self.max_candidate {
            self.max_candidate = self.counts[idx];
        }
    }

    fn recompute_lower(&mut self) {
        if self.top.len() < self.k {
            self.min_top = 0;
            return;
        }
        self.scratch.clear();
        self.scratch
            .extend(self.top.iter().map(|i| self.counts[i.index()]));
        let (_, kth, _) = self
            .scratch
            .select_nth_unstable_by(self.k - 1, |a, b| b.cmp(a));
        let kth = *kth;
        if kth == self.min_top {
            return;
        }
        self.min_top = kth;
        let mut i = 0;
        while i < self.top.len() {
            let item = self.top[i];
            if self.counts[item.index()] < kth {
                self.top.swap_remove(i);
                self.make_candidate(item);
            } else {
                i += 1;
            }
        }
    }

    /// Brings the candidate bound up to date.
    pub(crate) fn refresh(&mut self) {
        if !self.max_dirty {
            return;
        }
        let slot = &self.slot;
        let listed = &mut self.listed;
        self.candidates.retain(|i| {
            let keep = slot[i.index()] == Slot::Candidate;
            if !keep {
                listed[i.index()] = false;
            }
            keep
        });
        self.max_candidate = self
            .candidates
            .iter()
            .map(|i| self.counts[i.index()])
            .max()
            .unwrap_or(0);
        self.max_dirty = false;
        self.debug_check();
    }

    /// True when no candidate can still reach the top set, given that any
    /// item can gain at most `remaining` more. Call after [`Self::refresh`].
    pub(crate) fn separated(&self, remaining: u64) -> bool {
        debug_assert!(!self.max_dirty);
        u64::from(self.min_top) > u64::from(self.max_candidate) + remaining
    }

    pub(crate) fn snapshot(&self, remaining: u64, step: u64) -> EarlyExit {
        let mut top = self.top.clone();
        top.sort_unstable();
        EarlyExit {
            top,
            lower_bound: self.min_top,
            max_candidate: self.max_candidate,
            remaining,
            step,
        }
    }

    /// Result over the top set only.
    pub(crate) fn top_result(&self, order: &RankOrder, exact: bool) -> TopKResult {
        let mut r = TopKResult::select(
            self.top.iter().map(|&i| (i, self.counts[i.index()])),
            self.k,
            order,
        );
        r.exact_counts = exact;
        r
    }

    /// Result over every partial count (exact once the scan is complete).
    pub(crate) fn full_result(&self, order: &RankOrder) -> TopKResult {
        TopKResult::select(
            self.counts
                .iter()
                .enumerate()
                .map(|(i, &c)| (ItemId(i as u32), c)),
            self.k,
            order,
        )
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn partial(&self, item: ItemId) -> u32 {
        self.counts[item.index()]
    }

    pub fn partial_counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn is_top(&self, item: ItemId) -> bool {
        self.slot[item.index()] == Slot::Top
    }

    pub fn top(&self) -> &[ItemId] {
        &self.top
    }

    pub fn candidates(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.candidates
            .iter()
            .copied()
            .filter(|i| self.slot[i.index()] == Slot::Candidate)
    }

    pub fn lower_bound(&self) -> u32 {
        self.min_top
    }

    pub fn max_candidate(&self) -> u32 {
        self.max_candidate
    }

    fn debug_check(&self) {
        if cfg!(debug_assertions) {
            for &i in &self.top {
                debug_assert!(self.counts[i.index()] >= self.min_top);
            }
            for i in self.candidates() {
                debug_assert!(self.counts[i.index()] <= self.max_candidate);
                debug_assert!(self.counts[i.index()] < self.min_top);
            }
        }
    }
}

/// Bound state handed to observers after every unit of work.
pub struct Checkpoint<'a> {
    pub state: &'a TaState,
    /// Upper limit on what any single item can still gain.
    pub remaining: u64,
    /// Work units consumed so far.
    pub step: u64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TransactionDatabase;
    use proptest::prelude::*;

    fn order(m: usize) -> RankOrder {
        let rows: Vec<Vec<String>> = (0..m).map(|i| vec![format!("{i:03}")]).collect();
        RankOrder::build(&TransactionDatabase::from_rows(rows))
    }

    #[test]
    fn fills_top_before_admitting_candidates() {
        let mut s = TaState::new(2, 4);
        s.add(ItemId(0), 1);
        assert_eq!(s.lower_bound(), 0);
        s.add(ItemId(1), 3);
        assert_eq!(s.lower_bound(), 1);
        s.add(ItemId(2), 2);
        s.refresh();
        assert_eq!(s.lower_bound(), 2);
        assert!(!s.is_top(ItemId(0)));
        assert_eq!(s.max_candidate(), 1);
        s.add(ItemId(0), 5);
        s.refresh();
        assert!(s.is_top(ItemId(0)));
        assert_eq!(s.lower_bound(), 3);
        assert_eq!(s.max_candidate(), 2);
        assert!(s.separated(0));
        assert!(!s.separated(1));
    }

    proptest! {
        // After any sequence of increments the top set equals the
        // tie-inclusive top-k of the partial counts.
        #[test]
        fn top_set_matches_selection(
            ops in prop::collection::vec((0u32..10, 1u32..4), 1..80),
            k in 1usize..6,
        ) {
            let ord = order(10);
            let mut s = TaState::new(k, 10);
            for (item, delta) in ops {
                s.add(ItemId(item), delta);
                s.refresh();
                let expected = TopKResult::select(
                    s.partial_counts().iter().enumerate().map(|(i, &c)| (ItemId(i as u32), c)),
                    k,
                    &ord,
                );
                let mut top = s.top().to_vec();
                top.sort();
                let mut want: Vec<ItemId> = expected.items().collect();
                want.sort();
                prop_assert_eq!(top, want);
                let max_c = s.candidates().map(|i| s.partial(i)).max().unwrap_or(0);
                prop_assert_eq!(max_c, s.max_candidate());
            }
        }
    }
}

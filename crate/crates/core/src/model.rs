//! Domain types shared by every engine: the item dictionary, the transaction
//! database, the descending-support rank order, canonical queries and the
//! tie-inclusive top-k result.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::QueryError;

/// Dense item identifier, `0..m` in first-appearance order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(pub u32);

impl ItemId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// 1-based transaction identifier (position in the source file).
pub type Tid = u32;

/// Bijection between external item tokens and dense ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ItemDictionary {
    token_to_id: HashMap<String, ItemId>,
    id_to_token: Vec<String>,
}

impl ItemDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `token`, assigning the next free id on first sight.
    pub fn intern(&mut self, token: &str) -> ItemId {
        if let Some(&id) = self.token_to_id.get(token) {
            return id;
        }
        let id = ItemId(self.id_to_token.len() as u32);
        self.id_to_token.push(token.to_owned());
        self.token_to_id.insert(token.to_owned(), id);
        id
    }

    pub fn id(&self, token: &str) -> Option<ItemId> {
        self.token_to_id.get(token).copied()
    }

    pub fn token(&self, id: ItemId) -> &str {
        &self.id_to_token[id.index()]
    }

    pub fn len(&self) -> usize {
        self.id_to_token.len()
    }

    pub fn is_empty(&self) -> bool {
        self.id_to_token.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.id_to_token
    }
}

/// An immutable, in-memory transaction database.
///
/// Each transaction is a non-empty, strictly ascending sequence of item ids.
/// Transaction ids are 1-based positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransactionDatabase {
    transactions: Vec<Vec<ItemId>>,
    support: Vec<u32>,
    dictionary: ItemDictionary,
}

impl TransactionDatabase {
    /// Builds a database from rows of tokens. Duplicate tokens within a row
    /// collapse; rows without any token are skipped.
    pub fn from_rows<I, R, S>(rows: I) -> Self
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut dictionary = ItemDictionary::new();
        let mut transactions = Vec::new();
        for row in rows {
            let mut items: Vec<ItemId> = row
                .into_iter()
                .map(|tok| dictionary.intern(tok.as_ref()))
                .collect();
            if items.is_empty() {
                continue;
            }
            items.sort_unstable();
            items.dedup();
            transactions.push(items);
        }
        let mut support = vec![0u32; dictionary.len()];
        for t in &transactions {
            for item in t {
                support[item.index()] += 1;
            }
        }
        Self {
            transactions,
            support,
            dictionary,
        }
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    pub fn num_items(&self) -> usize {
        self.dictionary.len()
    }

    pub fn dictionary(&self) -> &ItemDictionary {
        &self.dictionary
    }

    pub fn support(&self, item: ItemId) -> u32 {
        self.support[item.index()]
    }

    pub fn supports(&self) -> &[u32] {
        &self.support
    }

    /// The transaction with the given 1-based id.
    pub fn transaction(&self, tid: Tid) -> Option<&[ItemId]> {
        let idx = (tid as usize).checked_sub(1)?;
        self.transactions.get(idx).map(Vec::as_slice)
    }

    /// Iterates `(tid, items)` in tid order.
    pub fn iter(&self) -> impl Iterator<Item = (Tid, &[ItemId])> + '_ {
        self.transactions
            .iter()
            .enumerate()
            .map(|(i, t)| (i as Tid + 1, t.as_slice()))
    }

    pub fn total_items(&self) -> u64 {
        self.transactions.iter().map(|t| t.len() as u64).sum()
    }

    pub fn avg_len(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.total_items() as f64 / self.len() as f64
        }
    }

    pub fn max_len(&self) -> usize {
        self.transactions.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Transactions per item; larger means denser.
    pub fn density(&self) -> f64 {
        if self.num_items() == 0 {
            0.0
        } else {
            self.len() as f64 / self.num_items() as f64
        }
    }

    /// Number of transactions among `tids` that contain every item of `items`.
    pub fn local_support_count<I>(&self, items: &[ItemId], tids: I) -> u32
    where
        I: IntoIterator<Item = Tid>,
    {
        tids.into_iter()
            .filter_map(|tid| self.transaction(tid))
            .filter(|t| items.iter().all(|i| t.binary_search(i).is_ok()))
            .count() as u32
    }

    /// Number of transactions that contain every item of `items`.
    pub fn support_count(&self, items: &[ItemId]) -> u32 {
        self.local_support_count(items, 1..=self.len() as Tid)
    }

    pub fn tokens<'a>(&'a self, items: &'a [ItemId]) -> impl Iterator<Item = &'a str> + 'a {
        items.iter().map(|&i| self.dictionary.token(i))
    }

    /// Checks the structural invariants against a full recount.
    pub fn validate(&self) -> Result<(), String> {
        let mut recount = vec![0u32; self.num_items()];
        for (tid, t) in self.iter() {
            if t.is_empty() {
                return Err(format!("transaction {tid} is empty"));
            }
            if t.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("transaction {tid} is not strictly ascending"));
            }
            for i in t {
                match recount.get_mut(i.index()) {
                    Some(c) => *c += 1,
                    None => return Err(format!("transaction {tid} references unknown {i}")),
                }
            }
        }
        if recount != self.support {
            return Err("support counts disagree with a recount".into());
        }
        Ok(())
    }
}

/// Items ordered by descending support; equal supports by ascending token.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankOrder {
    rank: Vec<u32>,
    order: Vec<ItemId>,
}

impl RankOrder {
    pub fn build(db: &TransactionDatabase) -> Self {
        let dict = db.dictionary();
        let mut order: Vec<ItemId> = (0..db.num_items() as u32).map(ItemId).collect();
        order.sort_by(|&a, &b| {
            db.support(b)
                .cmp(&db.support(a))
                .then_with(|| dict.token(a).cmp(dict.token(b)))
        });
        let mut rank = vec![0u32; order.len()];
        for (pos, item) in order.iter().enumerate() {
            rank[item.index()] = pos as u32;
        }
        Self { rank, order }
    }

    /// Rank position of `item`; 0 is the most frequent.
    #[inline]
    pub fn rank(&self, item: ItemId) -> u32 {
        self.rank[item.index()]
    }

    /// Items in rank order.
    pub fn order(&self) -> &[ItemId] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// True when `a` comes strictly before `b`.
    #[inline]
    pub fn ahead(&self, a: ItemId, b: ItemId) -> bool {
        self.rank(a) < self.rank(b)
    }

    pub fn sort(&self, items: &mut [ItemId]) {
        items.sort_unstable_by_key(|&i| self.rank(i));
    }
}

/// A canonical query itemset: duplicate-free, non-empty, rank-sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    items: Vec<ItemId>,
    k: usize,
}

impl Query {
    /// Canonicalizes known item ids.
    pub fn new(mut items: Vec<ItemId>, k: usize, order: &RankOrder) -> Result<Self, QueryError> {
        if k < 1 {
            return Err(QueryError::InvalidK);
        }
        if items.is_empty() {
            return Err(QueryError::EmptyQuery);
        }
        if let Some(bad) = items.iter().find(|i| i.index() >= order.len()) {
            return Err(QueryError::UnknownItemId(bad.0));
        }
        items.sort_unstable();
        items.dedup();
        order.sort(&mut items);
        Ok(Self { items, k })
    }

    /// Canonicalizes a token query. `Ok(None)` means some token is absent
    /// from the database, so no transaction can contain the itemset.
    pub fn from_tokens<S: AsRef<str>>(
        tokens: &[S],
        db: &TransactionDatabase,
        order: &RankOrder,
        k: usize,
    ) -> Result<Option<Self>, QueryError> {
        if k < 1 {
            return Err(QueryError::InvalidK);
        }
        if tokens.is_empty() {
            return Err(QueryError::EmptyQuery);
        }
        let mut items = Vec::with_capacity(tokens.len());
        for tok in tokens {
            match db.dictionary().id(tok.as_ref()) {
                Some(id) => items.push(id),
                None => return Ok(None),
            }
        }
        Self::new(items, k, order).map(Some)
    }

    pub fn items(&self) -> &[ItemId] {
        &self.items
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// The least frequent query item.
    pub fn last(&self) -> ItemId {
        *self.items.last().expect("queries are non-empty")
    }

    pub fn contains(&self, item: ItemId) -> bool {
        self.items.contains(&item)
    }

    /// Dense membership mask over `num_items` ids.
    pub fn mask(&self, num_items: usize) -> Vec<bool> {
        let mut mask = vec![false; num_items];
        for i in &self.items {
            mask[i.index()] = true;
        }
        mask
    }

    pub fn with_k(&self, k: usize) -> Result<Self, QueryError> {
        if k < 1 {
            return Err(QueryError::InvalidK);
        }
        Ok(Self {
            items: self.items.clone(),
            k,
        })
    }
}

/// Co-occurrence counts of the items that appear together with a query.
/// Only positive counts are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoCountTable {
    counts: BTreeMap<ItemId, u32>,
}

impl CoCountTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Collects the non-zero entries of a dense per-item count vector.
    pub fn from_dense(counts: &[u32]) -> Self {
        Self {
            counts: counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(i, &c)| (ItemId(i as u32), c))
                .collect(),
        }
    }

    pub fn add(&mut self, item: ItemId, delta: u32) {
        if delta > 0 {
            *self.counts.entry(item).or_insert(0) += delta;
        }
    }

    pub fn get(&self, item: ItemId) -> u32 {
        self.counts.get(&item).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ItemId, u32)> + '_ {
        self.counts.iter().map(|(&i, &c)| (i, c))
    }

    /// The table restricted to `items`.
    pub fn restrict(&self, items: impl IntoIterator<Item = ItemId>) -> Self {
        let mut out = Self::new();
        for i in items {
            out.add(i, self.get(i));
        }
        out
    }
}

impl FromIterator<(ItemId, u32)> for CoCountTable {
    fn from_iter<T: IntoIterator<Item = (ItemId, u32)>>(iter: T) -> Self {
        let mut table = Self::new();
        for (i, c) in iter {
            table.add(i, c);
        }
        table
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct TopKEntry {
    pub item: ItemId,
    pub count: u32,
}

/// Tie-inclusive top-k: every item whose count reaches the k-th largest.
///
/// Entries are sorted by count descending, then rank, then id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopKResult {
    pub entries: Vec<TopKEntry>,
    /// False only when a pruned engine returns partial counts.
    pub exact_counts: bool,
}

impl TopKResult {
    pub fn empty() -> Self {
        Self {
            entries: Vec::new(),
            exact_counts: true,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn items(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.entries.iter().map(|e| e.item)
    }

    /// `(token, count)` pairs for display and reports.
    pub fn to_tokens(&self, db: &TransactionDatabase) -> Vec<(String, u32)> {
        self.entries
            .iter()
            .map(|e| (db.dictionary().token(e.item).to_owned(), e.count))
            .collect()
    }

    /// Selects the tie-inclusive top-k from arbitrary `(item, count)` pairs.
    /// Zero counts are ignored.
    pub fn select<I>(pairs: I, k: usize, order: &RankOrder) -> Self
    where
        I: IntoIterator<Item = (ItemId, u32)>,
    {
        let mut entries: Vec<TopKEntry> = pairs
            .into_iter()
            .filter(|&(_, c)| c > 0)
            .map(|(item, count)| TopKEntry { item, count })
            .collect();
        if k == 0 || entries.is_empty() {
            return Self::empty();
        }
        entries.sort_unstable_by(|a, b| {
            b.count
                .cmp(&a.count)
                .then_with(|| order.rank(a.item).cmp(&order.rank(b.item)))
                .then_with(|| a.item.cmp(&b.item))
        });
        let threshold = entries[k.min(entries.len()) - 1].count;
        let keep = entries.partition_point(|e| e.count >= threshold);
        entries.truncate(keep);
        Self {
            entries,
            exact_counts: true,
        }
    }
}

/// Tie-inclusive top-k of a co-occurrence table.
pub fn finalize_topk(counts: &CoCountTable, k: usize, order: &RankOrder) -> TopKResult {
    TopKResult::select(counts.iter(), k, order)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub const SAMPLE_DB: &str = "b f g\na b c f\na c d f\nb c e\na c d e f\n";

    pub fn sample_db() -> TransactionDatabase {
        TransactionDatabase::from_rows(SAMPLE_DB.lines().map(str::split_whitespace))
    }

    pub fn ids(db: &TransactionDatabase, tokens: &str) -> Vec<ItemId> {
        tokens
            .chars()
            .map(|c| db.dictionary().id(&c.to_string()).unwrap())
            .collect()
    }

    pub fn query(db: &TransactionDatabase, order: &RankOrder, tokens: &str, k: usize) -> Query {
        Query::new(ids(db, tokens), k, order).unwrap()
    }

    pub fn named(db: &TransactionDatabase, r: &TopKResult) -> Vec<(String, u32)> {
        r.to_tokens(db)
    }

    pub fn pairs(v: &[(&str, u32)]) -> Vec<(String, u32)> {
        v.iter().map(|&(t, c)| (t.to_owned(), c)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    fn order_tokens(db: &TransactionDatabase, order: &RankOrder) -> String {
        db.tokens(order.order()).collect()
    }

    #[test]
    fn sample_db_rank_order() {
        let db = sample_db();
        assert_eq!(order_tokens(&db, &RankOrder::build(&db)), "cfabdeg");
    }

    #[test]
    fn rank_order_edge_cases() {
        let db = TransactionDatabase::from_rows([["x"]]);
        assert_eq!(order_tokens(&db, &RankOrder::build(&db)), "x");

        let db = TransactionDatabase::from_rows([["b"], ["a"]]);
        assert_eq!(db.support(db.dictionary().id("a").unwrap()), 1);
        assert_eq!(db.support(db.dictionary().id("b").unwrap()), 1);
        assert_eq!(order_tokens(&db, &RankOrder::build(&db)), "ab");

        let empty = TransactionDatabase::from_rows(Vec::<Vec<&str>>::new());
        assert!(RankOrder::build(&empty).is_empty());
    }

    #[test]
    fn canonicalize_query() {
        let db = sample_db();
        let order = RankOrder::build(&db);
        let q = Query::from_tokens(&["a", "c"], &db, &order, 2)
            .unwrap()
            .unwrap();
        assert_eq!(db.tokens(q.items()).collect::<String>(), "ca");
        let q = Query::from_tokens(&["c", "c"], &db, &order, 1)
            .unwrap()
            .unwrap();
        assert_eq!(db.tokens(q.items()).collect::<String>(), "c");
        assert!(Query::from_tokens(&["z"], &db, &order, 1)
            .unwrap()
            .is_none());
        assert!(matches!(
            Query::from_tokens::<&str>(&[], &db, &order, 1),
            Err(QueryError::EmptyQuery)
        ));
        assert!(matches!(
            Query::from_tokens(&["a"], &db, &order, 0),
            Err(QueryError::InvalidK)
        ));
    }

    #[test]
    fn finalize_examples() {
        let db = sample_db();
        let order = RankOrder::build(&db);
        let id = |t: &str| db.dictionary().id(t).unwrap();
        let table: CoCountTable = [(id("f"), 3), (id("d"), 2), (id("b"), 1), (id("e"), 1)]
            .into_iter()
            .collect();
        let r = finalize_topk(&table, 2, &order);
        assert_eq!(named(&db, &r), pairs(&[("f", 3), ("d", 2)]));
        let r = finalize_topk(&table, 3, &order);
        assert_eq!(
            named(&db, &r),
            pairs(&[("f", 3), ("d", 2), ("b", 1), ("e", 1)])
        );
        let r = finalize_topk(&table, 10, &order);
        assert_eq!(r.len(), 4);
        assert!(finalize_topk(&CoCountTable::new(), 3, &order).is_empty());
    }

    #[test]
    fn database_basics() {
        let db = sample_db();
        assert_eq!(db.len(), 5);
        assert_eq!(db.num_items(), 7);
        assert_eq!(db.support(db.dictionary().id("c").unwrap()), 4);
        assert_eq!(db.support_count(&ids(&db, "ac")), 3);
        assert_eq!(db.transaction(0), None);
        assert_eq!(db.transaction(1).unwrap().len(), 3);
        db.validate().unwrap();
        let dup = TransactionDatabase::from_rows([vec!["x", "x", "y"]]);
        assert_eq!(dup.transaction(1).unwrap().len(), 2);
    }

    fn arb_db() -> impl Strategy<Value = TransactionDatabase> {
        prop::collection::vec(prop::collection::vec(0u8..12, 1..6), 1..40).prop_map(|rows| {
            TransactionDatabase::from_rows(
                rows.into_iter()
                    .map(|r| r.into_iter().map(|i| format!("i{i}")).collect::<Vec<_>>()),
            )
        })
    }

    proptest! {
        #[test]
        fn rank_order_is_sorted_permutation(db in arb_db()) {
            db.validate().unwrap();
            let order = RankOrder::build(&db);
            let mut seen = order.order().to_vec();
            seen.sort();
            prop_assert_eq!(seen, (0..db.num_items() as u32).map(ItemId).collect::<Vec<_>>());
            for w in order.order().windows(2) {
                prop_assert!(db.support(w[0]) >= db.support(w[1]));
                if db.support(w[0]) == db.support(w[1]) {
                    prop_assert!(db.dictionary().token(w[0]) < db.dictionary().token(w[1]));
                }
            }
            for (pos, &i) in order.order().iter().enumerate() {
                prop_assert_eq!(order.rank(i) as usize, pos);
            }
        }

        #[test]
        fn finalize_is_tie_inclusive_and_idempotent(
            counts in prop::collection::vec(0u32..6, 1..15),
            k in 1usize..8,
        ) {
            let rows: Vec<Vec<String>> = (0..counts.len()).map(|i| vec![format!("t{i}")]).collect();
            let db = TransactionDatabase::from_rows(rows);
            let order = RankOrder::build(&db);
            let table = CoCountTable::from_dense(&counts);
            let r = finalize_topk(&table, k, &order);
            prop_assert!(r.len() >= k.min(table.len()));
            let included: Vec<u32> = r.entries.iter().map(|e| e.count).collect();
            let kth = included.iter().copied().min();
            for (item, c) in table.iter() {
                if !r.items().any(|i| i == item) {
                    prop_assert!(included.iter().all(|&x| x >= c));
                    prop_assert_ne!(Some(c), kth);
                }
            }
            let again = finalize_topk(&table.restrict(r.items()), k, &order);
            prop_assert_eq!(again, r);
        }
    }
}

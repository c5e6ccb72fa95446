//! The shared engine interface: one index bundle, six query strategies.

use std::fmt;
use std::str::FromStr;

use crate::error::QueryError;
use crate::model::{Query, RankOrder, TopKResult, TransactionDatabase};
use crate::pitree::PiTree;
use crate::ta::{EarlyExit, TaConfig};
use crate::tidset::TidSetIndex;
use crate::{naive, pt, tidset};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EngineKind {
    Nt,
    NtTa,
    Nti,
    NtiTa,
    Pt,
    PtTa,
}

impl EngineKind {
    pub const ALL: [EngineKind; 6] = [
        EngineKind::Nt,
        EngineKind::NtTa,
        EngineKind::Nti,
        EngineKind::NtiTa,
        EngineKind::Pt,
        EngineKind::PtTa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Nt => "nt",
            EngineKind::NtTa => "nt-ta",
            EngineKind::Nti => "nti",
            EngineKind::NtiTa => "nti-ta",
            EngineKind::Pt => "pt",
            EngineKind::PtTa => "pt-ta",
        }
    }

    pub fn uses_tidsets(self) -> bool {
        matches!(self, EngineKind::Nti | EngineKind::NtiTa)
    }

    pub fn uses_pitree(self) -> bool {
        matches!(self, EngineKind::Pt | EngineKind::PtTa)
    }

    pub fn is_pruned(self) -> bool {
        matches!(
            self,
            EngineKind::NtTa | EngineKind::NtiTa | EngineKind::PtTa
        )
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EngineKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EngineKind::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                format!("unknown engine {s:?} (expected one of nt, nt-ta, nti, nti-ta, pt, pt-ta)")
            })
    }
}

/// Result of one query plus the engine's work counter.
///
/// The counter is transactions scanned for `nt`/`nt-ta`, transactions in
/// the projected database for `nti`/`nti-ta`, and desirable nodes plus
/// visited subtree nodes for `pt`/`pt-ta`. Pruned engines count only the
/// work done before the bound separated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryOutcome {
    pub result: TopKResult,
    pub work: u64,
    pub early_exit: Option<EarlyExit>,
}

impl QueryOutcome {
    pub fn empty() -> Self {
        Self {
            result: TopKResult::empty(),
            work: 0,
            early_exit: None,
        }
    }
}

/// A loaded database with its rank order and whichever indexes were built.
pub struct CoOccurrenceIndex {
    db: TransactionDatabase,
    order: RankOrder,
    tidsets: Option<TidSetIndex>,
    tree: Option<PiTree>,
    ta: TaConfig,
}

impl CoOccurrenceIndex {
    /// Builds every index.
    pub fn build(db: TransactionDatabase) -> Self {
        Self::build_for(db, &EngineKind::ALL)
    }

    /// Builds only the indexes `engines` need.
    pub fn build_for(db: TransactionDatabase, engines: &[EngineKind]) -> Self {
        let order = RankOrder::build(&db);
        let tidsets = engines
            .iter()
            .any(|e| e.uses_tidsets())
            .then(|| TidSetIndex::build(&db));
        let tree = engines
            .iter()
            .any(|e| e.uses_pitree())
            .then(|| PiTree::build(&db, &order));
        Self {
            db,
            order,
            tidsets,
            tree,
            ta: TaConfig::default(),
        }
    }

    pub fn with_ta_config(mut self, ta: TaConfig) -> Self {
        self.ta = ta;
        self
    }

    pub fn db(&self) -> &TransactionDatabase {
        &self.db
    }

    pub fn order(&self) -> &RankOrder {
        &self.order
    }

    pub fn tidsets(&self) -> Option<&TidSetIndex> {
        self.tidsets.as_ref()
    }

    pub fn tree(&self) -> Option<&PiTree> {
        self.tree.as_ref()
    }

    pub fn ta_config(&self) -> TaConfig {
        self.ta
    }

    /// Canonicalizes a token query against this database.
    pub fn canonicalize<S: AsRef<str>>(
        &self,
        tokens: &[S],
        k: usize,
    ) -> Result<Option<Query>, QueryError> {
        Query::from_tokens(tokens, &self.db, &self.order, k)
    }

    /// Runs `engine` on a canonical query.
    ///
    /// Panics if the engine's index was not built.
    pub fn run(&self, engine: EngineKind, q: &Query) -> QueryOutcome {
        match engine {
            EngineKind::Nt => naive::nt_query(&self.db, &self.order, q),
            EngineKind::NtTa => naive::nt_ta_query(&self.db, &self.order, q, self.ta),
            EngineKind::Nti => tidset::nti_query(&self.db, self.expect_tidsets(), &self.order, q),
            EngineKind::NtiTa => {
                tidset::nti_ta_query(&self.db, self.expect_tidsets(), &self.order, q, self.ta)
            }
            EngineKind::Pt => pt::pt_query(self.expect_tree(), q),
            EngineKind::PtTa => pt::pt_ta_query(self.expect_tree(), q, self.ta),
        }
    }

    /// Canonicalizes and runs a token query; unknown tokens give an empty
    /// outcome.
    pub fn run_tokens<S: AsRef<str>>(
        &self,
        engine: EngineKind,
        tokens: &[S],
        k: usize,
    ) -> Result<QueryOutcome, QueryError> {
        Ok(match self.canonicalize(tokens, k)? {
            Some(q) => self.run(engine, &q),
            None => QueryOutcome::empty(),
        })
    }

    fn expect_tidsets(&self) -> &TidSetIndex {
        self.tidsets
            .as_ref()
            .expect("tid-set index was not built for this engine set")
    }

    fn expect_tree(&self) -> &PiTree {
        self.tree
            .as_ref()
            .expect("prefix tree was not built for this engine set")
    }
}

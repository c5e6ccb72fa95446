//! Top-k co-occurrence item queries over transaction databases.
//!
//! Given a query itemset `P` and a threshold `k`, find the items that appear
//! together with `P` in the most transactions. Six engines answer the same
//! question and are checked against each other and a brute-force oracle:
//!
//! | engine  | index            | pruning                       |
//! |---------|------------------|-------------------------------|
//! | `nt`    | none (full scan) | none                          |
//! | `nt-ta` | none (full scan) | threshold bounds              |
//! | `nti`   | tid-set lists    | none                          |
//! | `nti-ta`| tid-set lists    | threshold bounds              |
//! | `pt`    | prefix tree      | desirable-node search         |
//! | `pt-ta` | prefix tree      | desirable nodes + subtree bounds |
//!
//! Results are tie-inclusive: every item whose count equals the k-th largest
//! count is returned.

pub mod bench;
pub mod dataset;
pub mod engine;
pub mod error;
pub mod model;
pub mod naive;
pub mod oracle;
pub mod pitree;
pub mod pt;
pub mod report;
pub mod synth;
pub mod ta;
pub mod tidset;

pub use engine::{CoOccurrenceIndex, EngineKind, QueryOutcome};
pub use error::{BenchError, DatasetError, Mismatch, QueryError, ReportError};
pub use model::{
    finalize_topk, CoCountTable, ItemDictionary, ItemId, Query, RankOrder, Tid, TopKEntry,
    TopKResult, TransactionDatabase,
};
pub use pitree::PiTree;
pub use ta::{EarlyExit, NsOrder, TaConfig};
pub use tidset::TidSetIndex;

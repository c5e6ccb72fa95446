//! Prefix-tree engines.
//!
//! A query `P = i1 .. is` (rank order) is answered from the *desirable
//! nodes*: nodes labelled with the last item `is` whose root path also
//! registers every other query item. Every transaction containing `P` is
//! represented below exactly one desirable node, so
//!
//! * an item ranked ahead of `is` co-occurs with `P` once per transaction
//!   through each desirable node whose root path registers it, contributing
//!   that desirable node's count;
//! * an item ranked behind `is` co-occurs through the nodes registering it
//!   inside desirable subtrees, contributing each such node's own count.
//!
//! `pt` sums both passes directly. `pt-ta` computes the ancestor pass first,
//! then visits the desirable subtrees one child subtree at a time and stops
//! admitting new candidates once no outsider can catch up: an item can gain
//! at most the count of each unvisited subtree root.

use crate::engine::QueryOutcome;
use crate::model::{CoCountTable, ItemId, Query, TopKResult};
use crate::pitree::{NodeId, PiTree};
use crate::ta::{Checkpoint, NsOrder, TaConfig, TaState};

/// Nodes registering the query's last item whose root path registers the
/// whole query, in header-link order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DesirableNodeSet {
    nodes: Vec<NodeId>,
}

impl DesirableNodeSet {
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of transactions containing the query.
    pub fn support(&self, tree: &PiTree) -> u64 {
        self.nodes.iter().map(|&n| u64::from(tree.count(n))).sum()
    }
}

/// Walks each candidate node's root path matching the remaining query items
/// from the back. A path is abandoned as soon as it reaches a label ranked
/// ahead of the item still being looked for: everything further up ranks
/// even higher, so that item cannot appear.
pub fn find_desirable_nodes(tree: &PiTree, q: &Query) -> DesirableNodeSet {
    let order = tree.order();
    let items = q.items();
    let (&last, rest) = items.split_last().expect("queries are non-empty");
    let mut nodes = Vec::new();
    'candidates: for &n in tree.node_links(last) {
        let mut pending = rest.len();
        let mut cur = tree.parent(n);
        while pending > 0 {
            let want = rest[pending - 1];
            let node = match cur {
                Some(node) => node,
                None => continue 'candidates,
            };
            match tree.label(node) {
                None => continue 'candidates,
                Some(label) if label == want => {
                    pending -= 1;
                    cur = tree.parent(node);
                }
                Some(label) if order.ahead(want, label) => cur = tree.parent(node),
                Some(_) => continue 'candidates,
            }
        }
        nodes.push(n);
    }
    DesirableNodeSet { nodes }
}

/// Adds `weight` to every non-query label on the path from `n` (exclusive)
/// up to the root.
fn ancestor_pass(tree: &PiTree, q: &Query, n: NodeId, mut add: impl FnMut(ItemId)) {
    let mut cur = tree.parent(n);
    while let Some(node) = cur {
        match tree.label(node) {
            Some(label) if !q.contains(label) => add(label),
            Some(_) => {}
            None => break,
        }
        cur = tree.parent(node);
    }
}

fn pt_dense(tree: &PiTree, q: &Query) -> (Vec<u32>, u64) {
    let ns = find_desirable_nodes(tree, q);
    let mut counts = vec![0u32; tree.order().len()];
    let (labels, node_counts) = tree.raw();
    let mut work = ns.len() as u64;
    for &n in ns.nodes() {
        let weight = tree.count(n);
        ancestor_pass(tree, q, n, |label| counts[label.index()] += weight);
        let below = tree.descendants(n);
        work += u64::from(below.end - below.start);
        for d in below {
            counts[labels[d as usize] as usize] += node_counts[d as usize];
        }
    }
    (counts, work)
}

/// Full co-occurrence table from the tree.
pub fn pt_co_counts(tree: &PiTree, q: &Query) -> CoCountTable {
    CoCountTable::from_dense(&pt_dense(tree, q).0)
}

pub fn pt_query(tree: &PiTree, q: &Query) -> QueryOutcome {
    let (counts, work) = pt_dense(tree, q);
    QueryOutcome {
        result: TopKResult::select(
            counts
                .iter()
                .enumerate()
                .map(|(i, &c)| (ItemId(i as u32), c)),
            q.k(),
            tree.order(),
        ),
        work,
        early_exit: None,
    }
}

pub fn pt_ta_query(tree: &PiTree, q: &Query, cfg: TaConfig) -> QueryOutcome {
    pt_ta_query_traced(tree, q, cfg, |_| {})
}

/// [`pt_ta_query`] with an observer called after the ancestor pass and
/// after every subtree. `Checkpoint::step` counts subtrees visited and
/// `remaining` is the summed count of the unvisited subtree roots.
pub fn pt_ta_query_traced<F>(
    tree: &PiTree,
    q: &Query,
    cfg: TaConfig,
    mut observe: F,
) -> QueryOutcome
where
    F: FnMut(&Checkpoint<'_>),
{
    let order = tree.order();
    let mut ns = find_desirable_nodes(tree, q).nodes;
    if cfg.ns_order == NsOrder::DescendingCount {
        ns.sort_by_key(|&n| std::cmp::Reverse(tree.count(n)));
    }
    let mut state = TaState::new(q.k(), order.len());
    let mut work = ns.len() as u64;

    // ancestor-side items are exact after this pass
    for &n in &ns {
        let weight = tree.count(n);
        ancestor_pass(tree, q, n, |label| state.add(label, weight));
    }
    state.refresh();

    let units: Vec<NodeId> = ns.iter().flat_map(|&n| tree.children(n)).collect();
    let mut remaining: u64 = units.iter().map(|&c| u64::from(tree.count(c))).sum();
    let (labels, node_counts) = tree.raw();
    let mut early_exit = None;
    let mut next = 0;

    observe(&Checkpoint {
        state: &state,
        remaining,
        step: 0,
    });
    if remaining > 0 && state.separated(remaining) {
        early_exit = Some(state.snapshot(remaining, 0));
    }
    while early_exit.is_none() && next < units.len() {
        let unit = units[next];
        next += 1;
        let span = unit.0..tree.descendants(unit).end;
        work += u64::from(span.end - span.start);
        for d in span {
            state.add(ItemId(labels[d as usize]), node_counts[d as usize]);
        }
        state.refresh();
        remaining -= u64::from(tree.count(unit));
        observe(&Checkpoint {
            state: &state,
            remaining,
            step: next as u64,
        });
        if remaining > 0 && state.separated(remaining) {
            early_exit = Some(state.snapshot(remaining, next as u64));
        }
    }

    let result = match (&early_exit, cfg.finalize) {
        (None, _) => state.full_result(order),
        (Some(_), true) => {
            for &unit in &units[next..] {
                for d in unit.0..tree.descendants(unit).end {
                    state.add_if_top(ItemId(labels[d as usize]), node_counts[d as usize]);
                }
            }
            state.top_result(order, true)
        }
        (Some(_), false) => state.top_result(order, false),
    };
    QueryOutcome {
        result,
        work,
        early_exit,
    }
}

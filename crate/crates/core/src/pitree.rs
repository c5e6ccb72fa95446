//! Prefix itemset tree with parent links and a header table.
//!
//! Every transaction is sorted by rank (most frequent item first) and
//! inserted as a root path; shared prefixes share nodes and a node's count
//! is the number of transactions whose sorted prefix ends at or passes
//! through it. The header table lists, per item, every node labelled with
//! that item in creation order.
//!
//! After construction the nodes are renumbered in depth-first preorder
//! (children in insertion order), so the descendants of node `n` occupy the
//! contiguous id range `n + 1 .. end(n)`.

use std::collections::HashMap;
use std::ops::Range;

use crate::model::{ItemId, RankOrder, TransactionDatabase};

const NIL: u32 = u32::MAX;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug)]
pub struct PiTree {
    labels: Vec<u32>,
    counts: Vec<u32>,
    parents: Vec<u32>,
    ends: Vec<u32>,
    header: Vec<Vec<NodeId>>,
    order: RankOrder,
    transactions: usize,
}

/// Size figures for memory reporting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeStats {
    /// Non-root nodes.
    pub nodes: usize,
    pub leaves: usize,
    pub root_children: usize,
    pub max_depth: usize,
    /// `depth_histogram[d]` = number of nodes at depth `d` (root children
    /// are depth 1; index 0 is always 0).
    pub depth_histogram: Vec<usize>,
}

struct Builder {
    labels: Vec<u32>,
    counts: Vec<u32>,
    parents: Vec<u32>,
    first_child: Vec<u32>,
    last_child: Vec<u32>,
    next_sibling: Vec<u32>,
    child_of: HashMap<(u32, u32), u32>,
    header: Vec<Vec<u32>>,
}

impl Builder {
    fn new(num_items: usize) -> Self {
        Self {
            labels: vec![NIL],
            counts: vec![0],
            parents: vec![NIL],
            first_child: vec![NIL],
            last_child: vec![NIL],
            next_sibling: vec![NIL],
            child_of: HashMap::new(),
            header: vec![Vec::new(); num_items],
        }
    }

    /// Bumps the child of `parent` labelled `item`, creating it if needed.
    fn step(&mut self, parent: u32, item: ItemId) -> u32 {
        let next = self.labels.len() as u32;
        let child = *self.child_of.entry((parent, item.0)).or_insert(next);
        if child == next {
            self.labels.push(item.0);
            self.counts.push(1);
            self.parents.push(parent);
            self.first_child.push(NIL);
            self.last_child.push(NIL);
            self.next_sibling.push(NIL);
            let p = parent as usize;
            if self.first_child[p] == NIL {
                self.first_child[p] = child;
            } else {
                let last = self.last_child[p] as usize;
                self.next_sibling[last] = child;
            }
            self.last_child[p] = child;
            self.header[item.index()].push(child);
        } else {
            self.counts[child as usize] += 1;
        }
        child
    }

    fn finish(self, order: RankOrder, transactions: usize) -> PiTree {
        let n = self.labels.len();
        let mut preorder = Vec::with_capacity(n);
        let mut stack = vec![0u32];
        let mut kids = Vec::new();
        while let Some(v) = stack.pop() {
            preorder.push(v);
            kids.clear();
            let mut c = self.first_child[v as usize];
            while c != NIL {
                kids.push(c);
                c = self.next_sibling[c as usize];
            }
            stack.extend(kids.iter().rev());
        }
        let mut new_id = vec![0u32; n];
        for (pos, &old) in preorder.iter().enumerate() {
            new_id[old as usize] = pos as u32;
        }
        let mut size = vec![1u32; n];
        for &old in preorder.iter().rev() {
            let p = self.parents[old as usize];
            if p != NIL {
                size[p as usize] += size[old as usize];
            }
        }
        let mut labels = vec![NIL; n];
        let mut counts = vec![0; n];
        let mut parents = vec![NIL; n];
        let mut ends = vec![0; n];
        for old in 0..n {
            let new = new_id[old] as usize;
            labels[new] = self.labels[old];
            counts[new] = self.counts[old];
            let p = self.parents[old];
            parents[new] = if p == NIL { NIL } else { new_id[p as usize] };
            ends[new] = new as u32 + size[old];
        }
        counts[0] = transactions as u32;
        let header = self
            .header
            .into_iter()
            .map(|links| {
                links
                    .into_iter()
                    .map(|o| NodeId(new_id[o as usize]))
                    .collect()
            })
            .collect();
        PiTree {
            labels,
            counts,
            parents,
            ends,
            header,
            order,
            transactions,
        }
    }
}

impl PiTree {
    /// Inserts every transaction, sorted by `order`, as a root path.
    pub fn build(db: &TransactionDatabase, order: &RankOrder) -> Self {
        let mut builder = Builder::new(db.num_items());
        let mut sorted = Vec::new();
        for (_, t) in db.iter() {
            sorted.clear();
            sorted.extend_from_slice(t);
            order.sort(&mut sorted);
            let mut node = 0u32;
            for &item in &sorted {
                node = builder.step(node, item);
            }
        }
        builder.finish(order.clone(), db.len())
    }

    pub fn root(&self) -> NodeId {
        NodeId::ROOT
    }

    pub fn order(&self) -> &RankOrder {
        &self.order
    }

    pub fn num_transactions(&self) -> usize {
        self.transactions
    }

    /// Non-root node count.
    pub fn node_count(&self) -> usize {
        self.labels.len() - 1
    }

    /// `None` for the root.
    #[inline]
    pub fn label(&self, n: NodeId) -> Option<ItemId> {
        let l = self.labels[n.index()];
        (l != NIL).then_some(ItemId(l))
    }

    /// The root's count is the number of transactions.
    #[inline]
    pub fn count(&self, n: NodeId) -> u32 {
        self.counts[n.index()]
    }

    #[inline]
    pub fn parent(&self, n: NodeId) -> Option<NodeId> {
        let p = self.parents[n.index()];
        (p != NIL).then_some(NodeId(p))
    }

    /// Ids of every node strictly below `n`.
    #[inline]
    pub fn descendants(&self, n: NodeId) -> Range<u32> {
        n.0 + 1..self.ends[n.index()]
    }

    /// Children of `n` in insertion order.
    pub fn children(&self, n: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        let end = self.ends[n.index()];
        let mut next = n.0 + 1;
        std::iter::from_fn(move || {
            if next >= end {
                return None;
            }
            let c = next;
            next = self.ends[c as usize];
            Some(NodeId(c))
        })
    }

    /// Header node-links for `item`, in creation order.
    pub fn node_links(&self, item: ItemId) -> &[NodeId] {
        self.header.get(item.index()).map_or(&[], Vec::as_slice)
    }

    /// Header entries in rank order.
    pub fn header(&self) -> impl Iterator<Item = (ItemId, &[NodeId])> + '_ {
        self.order
            .order()
            .iter()
            .map(|&i| (i, self.header[i.index()].as_slice()))
    }

    /// Raw label and count slices for tight descendant loops.
    #[inline]
    pub(crate) fn raw(&self) -> (&[u32], &[u32]) {
        (&self.labels, &self.counts)
    }

    /// Sum of the counts of nodes labelled `item` in the subtree rooted at
    /// `n` (including `n` itself).
    pub fn fre(&self, item: ItemId, n: NodeId) -> u32 {
        (n.0..self.ends[n.index()])
            .filter(|&d| self.labels[d as usize] == item.0)
            .map(|d| self.counts[d as usize])
            .sum()
    }

    pub fn stats(&self) -> TreeStats {
        let n = self.labels.len();
        let mut depth = vec![0usize; n];
        let mut histogram = vec![0usize];
        let mut leaves = 0;
        for v in 1..n {
            let d = depth[self.parents[v] as usize] + 1;
            depth[v] = d;
            if histogram.len() <= d {
                histogram.resize(d + 1, 0);
            }
            histogram[d] += 1;
            if self.ends[v] == v as u32 + 1 {
                leaves += 1;
            }
        }
        TreeStats {
            nodes: n - 1,
            leaves,
            root_children: self.children(self.root()).count(),
            max_depth: histogram.len() - 1,
            depth_histogram: histogram,
        }
    }

    /// Checks the structural invariants against the source database.
    pub fn check_invariants(&self, db: &TransactionDatabase) -> Result<(), String> {
        for (idx, links) in self.header.iter().enumerate() {
            let item = ItemId(idx as u32);
            let sum: u64 = links.iter().map(|&n| u64::from(self.count(n))).sum();
            if sum != u64::from(db.support(item)) {
                return Err(format!(
                    "header counts for {item} sum to {sum}, support is {}",
                    db.support(item)
                ));
            }
            if let Some(bad) = links.iter().find(|&&n| self.label(n) != Some(item)) {
                return Err(format!(
                    "header entry for {item} links node {bad:?} with another label"
                ));
            }
        }
        let root_sum: u64 = self
            .children(self.root())
            .map(|c| u64::from(self.count(c)))
            .sum();
        if root_sum != db.len() as u64 {
            return Err(format!(
                "root children sum to {root_sum}, expected {}",
                db.len()
            ));
        }
        for v in 0..self.labels.len() as u32 {
            let node = NodeId(v);
            let mut labels = Vec::new();
            let mut child_sum = 0u64;
            for c in self.children(node) {
                if self.parent(c) != Some(node) {
                    return Err(format!("node {c:?} has a wrong parent link"));
                }
                let cl = self.label(c).ok_or("child without label")?;
                if let Some(pl) = self.label(node) {
                    if self.order.rank(pl) >= self.order.rank(cl) {
                        return Err(format!("edge {node:?}->{c:?} does not increase rank"));
                    }
                }
                labels.push(cl);
                child_sum += u64::from(self.count(c));
            }
            if child_sum > u64::from(self.count(node)) {
                return Err(format!("children of {node:?} outweigh it"));
            }
            labels.sort_unstable();
            if labels.windows(2).any(|w| w[0] == w[1]) {
                return Err(format!("duplicate child label under {node:?}"));
            }
        }
        Ok(())
    }
}

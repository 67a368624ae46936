//! Rooted and unrooted contraction trees.
//!
//! Leaves biject with network vertices; internal nodes are pairwise
//! contractions. A rooted tree adds a distinguished root: for closed networks
//! a synthetic degree-1 node holding the final scalar, for networks with an
//! environment vertex the environment's own leaf.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Network, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub fn index(&self) -> usize {
        self.0 as usize
    }

    fn new(i: usize) -> Self {
        NodeId(i as u32)
    }
}

/// A tree edge, endpoints normalized to (min, max).
pub type TreeEdge = (NodeId, NodeId);

pub fn tree_edge(a: NodeId, b: NodeId) -> TreeEdge {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeKind {
    Rooted,
    Unrooted,
}

/// One contraction step: the two (disjoint) sets of original vertices whose
/// merged tensors get contracted.
pub type OrderStep = (BTreeSet<VertexId>, BTreeSet<VertexId>);

#[derive(Debug, Clone)]
pub struct ContractionTree {
    adj: Vec<Vec<NodeId>>,
    vertex_of: Vec<Option<VertexId>>,
    node_of: BTreeMap<VertexId, NodeId>,
    root: Option<NodeId>,
}

impl ContractionTree {
    pub fn kind(&self) -> TreeKind {
        if self.root.is_some() {
            TreeKind::Rooted
        } else {
            TreeKind::Unrooted
        }
    }

    pub fn is_rooted(&self) -> bool {
        self.root.is_some()
    }

    pub fn root(&self) -> Option<NodeId> {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.adj.len()).map(NodeId::new)
    }

    pub fn neighbors(&self, x: NodeId) -> &[NodeId] {
        &self.adj[x.index()]
    }

    pub fn degree(&self, x: NodeId) -> usize {
        self.adj[x.index()].len()
    }

    /// The network vertex at a leaf node, if any.
    pub fn vertex_at(&self, x: NodeId) -> Option<VertexId> {
        self.vertex_of[x.index()]
    }

    pub fn leaf_for(&self, v: VertexId) -> Option<NodeId> {
        self.node_of.get(&v).copied()
    }

    pub fn leaf_map(&self) -> impl Iterator<Item = (VertexId, NodeId)> + '_ {
        self.node_of.iter().map(|(&v, &n)| (v, n))
    }

    pub fn leaf_count(&self) -> usize {
        self.node_of.len()
    }

    /// Internal nodes: not leaf-mapped and not the root. Each corresponds to
    /// one pairwise contraction.
    pub fn internal_nodes(&self) -> Vec<NodeId> {
        self.nodes()
            .filter(|&x| self.vertex_of[x.index()].is_none() && Some(x) != self.root)
            .collect()
    }

    pub fn tree_edges(&self) -> Vec<TreeEdge> {
        let mut out = Vec::new();
        for x in self.nodes() {
            for &y in self.neighbors(x) {
                if x < y {
                    out.push((x, y));
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|ns| ns.len()).sum::<usize>() / 2
    }

    /// Unique path between two nodes, endpoints included.
    pub fn path(&self, a: NodeId, b: NodeId) -> Vec<NodeId> {
        if a == b {
            return vec![a];
        }
        let mut prev: Vec<Option<NodeId>> = vec![None; self.node_count()];
        let mut queue = VecDeque::new();
        queue.push_back(a);
        prev[a.index()] = Some(a);
        while let Some(x) = queue.pop_front() {
            if x == b {
                break;
            }
            for &y in self.neighbors(x) {
                if prev[y.index()].is_none() {
                    prev[y.index()] = Some(x);
                    queue.push_back(y);
                }
            }
        }
        let mut path = vec![b];
        let mut cur = b;
        while cur != a {
            cur = prev[cur.index()].expect("tree is connected");
            path.push(cur);
        }
        path.reverse();
        path
    }

    /// Parent map with respect to the root; children-before-parent postorder.
    pub fn oriented(&self) -> Result<Oriented> {
        let root = self
            .root
            .ok_or_else(|| Error::InvalidTree("operation requires a rooted tree".into()))?;
        let mut parent: Vec<Option<NodeId>> = vec![None; self.node_count()];
        let mut postorder = Vec::with_capacity(self.node_count());
        let mut stack = vec![(root, false)];
        let mut seen = vec![false; self.node_count()];
        seen[root.index()] = true;
        while let Some((x, expanded)) = stack.pop() {
            if expanded {
                postorder.push(x);
                continue;
            }
            stack.push((x, true));
            for &y in self.neighbors(x) {
                if !seen[y.index()] {
                    seen[y.index()] = true;
                    parent[y.index()] = Some(x);
                    stack.push((y, false));
                }
            }
        }
        Ok(Oriented { root, parent, postorder })
    }

    /// Split `at` with a fresh node and hang a new root off it.
    pub fn root_at(&self, at: TreeEdge) -> Result<ContractionTree> {
        if self.is_rooted() {
            return Err(Error::InvalidTree("tree is already rooted".into()));
        }
        let (a, b) = at;
        if !self.neighbors(a).contains(&b) {
            return Err(Error::InvalidTree(format!(
                "({},{}) is not a tree edge",
                a.index(),
                b.index()
            )));
        }
        let mut adj = self.adj.clone();
        let mut vertex_of = self.vertex_of.clone();
        let w = NodeId::new(adj.len());
        adj.push(Vec::new());
        vertex_of.push(None);
        let r = NodeId::new(adj.len());
        adj.push(Vec::new());
        vertex_of.push(None);
        adj[a.index()].retain(|&x| x != b);
        adj[b.index()].retain(|&x| x != a);
        adj[a.index()].push(w);
        adj[b.index()].push(w);
        adj[w.index()].extend([a, b, r]);
        adj[r.index()].push(w);
        for ns in adj.iter_mut() {
            ns.sort_unstable();
        }
        Ok(ContractionTree { adj, vertex_of, node_of: self.node_of.clone(), root: Some(r) })
    }

    /// Designate an existing leaf as the root (environment networks).
    pub fn root_at_leaf(&self, v: VertexId) -> Result<ContractionTree> {
        if self.is_rooted() {
            return Err(Error::InvalidTree("tree is already rooted".into()));
        }
        let node = self
            .leaf_for(v)
            .ok_or_else(|| Error::LeafMismatch(format!("vertex #{} has no leaf", v.index())))?;
        let mut out = self.clone();
        out.root = Some(node);
        Ok(out)
    }

    /// Remove the root. A synthetic root disappears together with the split
    /// node it hangs off; an environment-leaf root simply loses its marker.
    pub fn unroot(&self) -> Result<ContractionTree> {
        let root = self
            .root
            .ok_or_else(|| Error::InvalidTree("tree is already unrooted".into()))?;
        if self.vertex_of[root.index()].is_some() {
            let mut out = self.clone();
            out.root = None;
            return Ok(out);
        }
        let mut adj = self.adj.clone();
        let w = self.neighbors(root)[0];
        adj[w.index()].retain(|&x| x != root);
        adj[root.index()].clear();
        let mut drop = vec![root];
        if adj[w.index()].len() == 2 {
            let (x, y) = (adj[w.index()][0], adj[w.index()][1]);
            adj[x.index()].retain(|&z| z != w);
            adj[y.index()].retain(|&z| z != w);
            adj[x.index()].push(y);
            adj[y.index()].push(x);
            adj[w.index()].clear();
            drop.push(w);
        }
        compact(adj, self.vertex_of.clone(), &drop, None)
    }

    /// Labeled-tree equality: same shape with the same vertices on the same
    /// leaves (node numbering is irrelevant).
    pub fn labeled_eq(&self, other: &ContractionTree) -> bool {
        self.canonical_key() == other.canonical_key()
    }

    /// Canonical serialization used for deterministic tie-breaking.
    pub fn canonical_key(&self) -> String {
        fn rec(tree: &ContractionTree, x: NodeId, parent: Option<NodeId>) -> String {
            if let Some(v) = tree.vertex_at(x) {
                if Some(x) != tree.root {
                    return format!("v{}", v.index());
                }
            }
            let mut parts: Vec<String> = tree
                .neighbors(x)
                .iter()
                .filter(|&&y| Some(y) != parent)
                .map(|&y| rec(tree, y, Some(x)))
                .collect();
            parts.sort();
            format!("({})", parts.join(","))
        }
        match self.root {
            Some(r) => {
                let tag = match self.vertex_at(r) {
                    Some(v) => format!("root@v{}", v.index()),
                    None => "root".to_string(),
                };
                let below: Vec<String> =
                    self.neighbors(r).iter().map(|&y| rec(self, y, Some(r))).collect();
                format!("{tag}{}", below.join(""))
            }
            None => {
                if self.node_count() == 1 {
                    return rec(self, NodeId::new(0), None);
                }
                // anchor at the leaf with the smallest vertex id
                let (&v, &leaf) = self.node_of.iter().next().expect("leaf exists");
                let nb = self.neighbors(leaf)[0];
                format!("[v{}]{}", v.index(), rec(self, nb, Some(leaf)))
            }
        }
    }

    /// Full structural validation against a network.
    pub fn validate(&self, net: &Network) -> Result<()> {
        let n = self.node_count();
        if n == 0 {
            return Err(Error::InvalidTree("empty tree".into()));
        }
        if self.edge_count() != n - 1 {
            return Err(Error::InvalidTree(format!(
                "{} edges on {} nodes (not a tree)",
                self.edge_count(),
                n
            )));
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([NodeId::new(0)]);
        seen[0] = true;
        let mut visited = 0;
        while let Some(x) = queue.pop_front() {
            visited += 1;
            for &y in self.neighbors(x) {
                if !seen[y.index()] {
                    seen[y.index()] = true;
                    queue.push_back(y);
                }
            }
        }
        if visited != n {
            return Err(Error::InvalidTree("disconnected".into()));
        }
        // leaf bijection
        let vertices: BTreeSet<VertexId> = net.vertices().collect();
        let mapped: BTreeSet<VertexId> = self.node_of.keys().copied().collect();
        if vertices != mapped {
            let missing: Vec<String> = vertices
                .difference(&mapped)
                .map(|v| net.name(*v).to_string())
                .collect();
            let extra: Vec<usize> = mapped.difference(&vertices).map(|v| v.index()).collect();
            return Err(Error::LeafMismatch(format!(
                "missing leaves for {missing:?}, unknown vertices {extra:?}"
            )));
        }
        for (&v, &node) in &self.node_of {
            if self.vertex_of[node.index()] != Some(v) {
                return Err(Error::InvalidTree("leaf map is not involutive".into()));
            }
        }
        // degrees
        for x in self.nodes() {
            let d = self.degree(x);
            let is_mapped = self.vertex_of[x.index()].is_some();
            if is_mapped {
                if d > 1 {
                    return Err(Error::InvalidTree(format!(
                        "leaf node {} has degree {d}",
                        x.index()
                    )));
                }
            } else if Some(x) == self.root {
                if d != 1 {
                    return Err(Error::InvalidTree(format!("root has degree {d}")));
                }
            } else if d != 3 {
                return Err(Error::InvalidTree(format!(
                    "internal node {} has degree {d}",
                    x.index()
                )));
            }
        }
        if let Some(r) = self.root {
            match net.environment() {
                Some(env) => {
                    if self.vertex_at(r) != Some(env) {
                        return Err(Error::InvalidTree(
                            "rooted tree over an open network must root at the environment leaf"
                                .into(),
                        ));
                    }
                }
                None => {
                    if self.vertex_at(r).is_some() {
                        return Err(Error::InvalidTree(
                            "root of a closed network cannot be a leaf of the bijection".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// The base vertices contracted by orders over this tree (everything
    /// except an environment root).
    fn base_sets(&self) -> Vec<(NodeId, BTreeSet<VertexId>)> {
        self.node_of
            .iter()
            .filter(|&(_, &node)| Some(node) != self.root)
            .map(|(&v, &node)| (node, BTreeSet::from([v])))
            .collect()
    }
}

pub struct Oriented {
    pub root: NodeId,
    pub parent: Vec<Option<NodeId>>,
    pub postorder: Vec<NodeId>,
}

impl Oriented {
    pub fn parent_of(&self, x: NodeId) -> Option<NodeId> {
        self.parent[x.index()]
    }

    /// The tree edge from `x` toward the root.
    pub fn up_edge(&self, x: NodeId) -> Option<TreeEdge> {
        self.parent[x.index()].map(|p| tree_edge(x, p))
    }
}

fn compact(
    adj: Vec<Vec<NodeId>>,
    vertex_of: Vec<Option<VertexId>>,
    drop: &[NodeId],
    root: Option<NodeId>,
) -> Result<ContractionTree> {
    let dropset: BTreeSet<NodeId> = drop.iter().copied().collect();
    let mut remap: Vec<Option<NodeId>> = vec![None; adj.len()];
    let mut next = 0usize;
    for i in 0..adj.len() {
        if !dropset.contains(&NodeId::new(i)) {
            remap[i] = Some(NodeId::new(next));
            next += 1;
        }
    }
    let mut new_adj = vec![Vec::new(); next];
    let mut new_vertex = vec![None; next];
    let mut node_of = BTreeMap::new();
    for i in 0..adj.len() {
        let Some(ni) = remap[i] else { continue };
        for &y in &adj[i] {
            let ny = remap[y.index()].ok_or_else(|| {
                Error::InvalidTree("dropped node still referenced".into())
            })?;
            new_adj[ni.index()].push(ny);
        }
        new_vertex[ni.index()] = vertex_of[i];
        if let Some(v) = vertex_of[i] {
            node_of.insert(v, ni);
        }
    }
    for ns in new_adj.iter_mut() {
        ns.sort_unstable();
    }
    let root = match root {
        Some(r) => Some(remap[r.index()].ok_or_else(|| {
            Error::InvalidTree("root was dropped".into())
        })?),
        None => None,
    };
    Ok(ContractionTree { adj: new_adj, vertex_of: new_vertex, node_of, root })
}

/// Incremental tree construction. Shape invariants are checked by
/// [`ContractionTree::validate`], not here.
#[derive(Debug, Default)]
pub struct TreeBuilder {
    adj: Vec<Vec<NodeId>>,
    vertex_of: Vec<Option<VertexId>>,
    node_of: BTreeMap<VertexId, NodeId>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_leaf(&mut self, v: VertexId) -> NodeId {
        let id = NodeId::new(self.adj.len());
        self.adj.push(Vec::new());
        self.vertex_of.push(Some(v));
        self.node_of.insert(v, id);
        id
    }

    pub fn add_internal(&mut self) -> NodeId {
        let id = NodeId::new(self.adj.len());
        self.adj.push(Vec::new());
        self.vertex_of.push(None);
        id
    }

    pub fn connect(&mut self, a: NodeId, b: NodeId) {
        self.adj[a.index()].push(b);
        self.adj[b.index()].push(a);
    }

    pub fn build(mut self, root: Option<NodeId>) -> ContractionTree {
        for ns in self.adj.iter_mut() {
            ns.sort_unstable();
        }
        ContractionTree { adj: self.adj, vertex_of: self.vertex_of, node_of: self.node_of, root }
    }
}

/// Build the rooted contraction tree of a contraction order.
///
/// An order is a sequence of steps merging disjoint, previously formed (or
/// original) vertex sets. Closed networks need `n - 1` steps ending with all
/// vertices merged; networks with an environment contract everything except
/// the environment, which becomes the root leaf.
pub fn tree_from_order(net: &Network, order: &[OrderStep]) -> Result<ContractionTree> {
    let env = net.environment();
    let base: Vec<VertexId> = net.vertices().filter(|&v| Some(v) != env).collect();
    if base.is_empty() {
        return Err(Error::InvalidTree("network has no contractable vertices".into()));
    }
    let mut builder = TreeBuilder::new();
    let mut parts: BTreeMap<BTreeSet<VertexId>, NodeId> = BTreeMap::new();
    for &v in &base {
        let node = builder.add_leaf(v);
        parts.insert(BTreeSet::from([v]), node);
    }
    for (step, (s1, s2)) in order.iter().enumerate() {
        if !s1.is_disjoint(s2) {
            return Err(Error::BadOrder { step, reason: "sets are not disjoint".into() });
        }
        let n1 = parts.remove(s1).ok_or_else(|| Error::BadOrder {
            step,
            reason: format!("first set {} is not available", fmt_set(net, s1)),
        })?;
        let n2 = parts.remove(s2).ok_or_else(|| Error::BadOrder {
            step,
            reason: format!("second set {} is not available", fmt_set(net, s2)),
        })?;
        let j = builder.add_internal();
        builder.connect(j, n1);
        builder.connect(j, n2);
        parts.insert(s1.union(s2).copied().collect(), j);
    }
    if parts.len() != 1 {
        return Err(Error::BadOrder {
            step: order.len(),
            reason: format!("{} unmerged groups remain", parts.len()),
        });
    }
    let (top_set, top) = parts.into_iter().next().expect("one part");
    if top_set.len() != base.len() {
        return Err(Error::BadOrder {
            step: order.len(),
            reason: "order does not merge every vertex".into(),
        });
    }
    let root = match env {
        Some(e) => {
            let leaf = builder.add_leaf(e);
            builder.connect(leaf, top);
            leaf
        }
        None => {
            let r = builder.add_internal();
            builder.connect(r, top);
            r
        }
    };
    let tree = builder.build(Some(root));
    tree.validate(net)?;
    Ok(tree)
}

fn fmt_set(net: &Network, s: &BTreeSet<VertexId>) -> String {
    let names: Vec<&str> = s.iter().map(|&v| net.name(v)).collect();
    format!("{{{}}}", names.join(","))
}

/// Enumerate every contraction order consistent with a rooted tree, by
/// repeatedly removing a close pair of non-root leaves. The first order
/// yielded picks the lexicographically smallest close pair at every step.
pub fn orders_from_tree(tree: &ContractionTree) -> Result<OrdersIter> {
    if !tree.is_rooted() {
        return Err(Error::InvalidTree("orders are enumerated from rooted trees".into()));
    }
    Ok(OrdersIter::new(tree))
}

#[derive(Clone)]
struct ShrinkState {
    alive: Vec<bool>,
    adj: Vec<BTreeSet<NodeId>>,
    set_of: Vec<Option<BTreeSet<VertexId>>>,
    root: NodeId,
}

impl ShrinkState {
    fn new(tree: &ContractionTree) -> Self {
        let mut set_of: Vec<Option<BTreeSet<VertexId>>> = vec![None; tree.node_count()];
        for (node, set) in tree.base_sets() {
            set_of[node.index()] = Some(set);
        }
        ShrinkState {
            alive: vec![true; tree.node_count()],
            adj: tree
                .adj
                .iter()
                .map(|ns| ns.iter().copied().collect())
                .collect(),
            set_of,
            root: tree.root.expect("rooted"),
        }
    }

    fn done(&self) -> bool {
        // done when only the root and one other node remain
        self.alive.iter().filter(|&&a| a).count() <= 2
    }

    /// Close pairs of non-root leaves, sorted lexicographically by leaf sets.
    fn close_pairs(&self) -> Vec<(NodeId, NodeId)> {
        let mut pairs = Vec::new();
        for c in 0..self.adj.len() {
            if !self.alive[c] || self.set_of[c].is_some() {
                continue;
            }
            let leaves: Vec<NodeId> = self.adj[c]
                .iter()
                .copied()
                .filter(|&x| {
                    self.alive[x.index()]
                        && x != self.root
                        && self.set_of[x.index()].is_some()
                })
                .collect();
            for i in 0..leaves.len() {
                for j in i + 1..leaves.len() {
                    let (a, b) = (leaves[i], leaves[j]);
                    let sa = self.set_of[a.index()].as_ref().expect("leaf");
                    let sb = self.set_of[b.index()].as_ref().expect("leaf");
                    if sa <= sb {
                        pairs.push((a, b));
                    } else {
                        pairs.push((b, a));
                    }
                }
            }
        }
        pairs.sort_by(|&(a1, b1), &(a2, b2)| {
            let key = |x: NodeId| self.set_of[x.index()].as_ref().expect("leaf");
            (key(a1), key(b1)).cmp(&(key(a2), key(b2)))
        });
        pairs
    }

    fn contract(&mut self, a: NodeId, b: NodeId) -> OrderStep {
        let center = *self.adj[a.index()]
            .intersection(&self.adj[b.index()])
            .next()
            .expect("close pair shares a neighbor");
        let sa = self.set_of[a.index()].take().expect("leaf");
        let sb = self.set_of[b.index()].take().expect("leaf");
        self.alive[a.index()] = false;
        self.alive[b.index()] = false;
        self.adj[center.index()].remove(&a);
        self.adj[center.index()].remove(&b);
        let merged: BTreeSet<VertexId> = sa.union(&sb).copied().collect();
        self.set_of[center.index()] = Some(merged);
        (sa, sb)
    }
}

struct Frame {
    state: ShrinkState,
    steps: Vec<OrderStep>,
    choices: Vec<(NodeId, NodeId)>,
    next: usize,
}

/// Depth-first enumeration of contraction orders.
pub struct OrdersIter {
    stack: Vec<Frame>,
}

impl OrdersIter {
    fn new(tree: &ContractionTree) -> Self {
        let state = ShrinkState::new(tree);
        let choices = state.close_pairs();
        OrdersIter { stack: vec![Frame { state, steps: Vec::new(), choices, next: 0 }] }
    }
}

impl Iterator for OrdersIter {
    type Item = Vec<OrderStep>;

    fn next(&mut self) -> Option<Self::Item> {
        while let Some(frame) = self.stack.last_mut() {
            if frame.state.done() {
                let order = frame.steps.clone();
                self.stack.pop();
                return Some(order);
            }
            if frame.next >= frame.choices.len() {
                self.stack.pop();
                continue;
            }
            let (a, b) = frame.choices[frame.next];
            frame.next += 1;
            let mut state = frame.state.clone();
            let mut steps = frame.steps.clone();
            steps.push(state.contract(a, b));
            let choices = state.close_pairs();
            self.stack.push(Frame { state, steps, choices, next: 0 });
        }
        None
    }
}

/// Uniform-ish random rooted tree via a random merge order.
pub fn random_rooted_tree<R: Rng>(net: &Network, rng: &mut R) -> Result<ContractionTree> {
    let env = net.environment();
    let base: Vec<VertexId> = net.vertices().filter(|&v| Some(v) != env).collect();
    let mut parts: Vec<BTreeSet<VertexId>> =
        base.iter().map(|&v| BTreeSet::from([v])).collect();
    let mut order = Vec::new();
    while parts.len() > 1 {
        let i = rng.gen_range(0..parts.len());
        let s1 = parts.swap_remove(i);
        let j = rng.gen_range(0..parts.len());
        let s2 = parts.swap_remove(j);
        parts.push(s1.union(&s2).copied().collect());
        order.push((s1, s2));
    }
    tree_from_order(net, &order)
}

/// Random unrooted tree: random rooted tree with the root removed.
pub fn random_unrooted_tree<R: Rng>(net: &Network, rng: &mut R) -> Result<ContractionTree> {
    random_rooted_tree(net, rng)?.unroot()
}

/// A random topological order of a rooted tree's internal nodes.
pub fn random_topological_order<R: Rng>(
    tree: &ContractionTree,
    rng: &mut R,
) -> Result<Vec<NodeId>> {
    let oriented = tree.oriented()?;
    let internal: BTreeSet<NodeId> = tree.internal_nodes().into_iter().collect();
    let mut pending_children: BTreeMap<NodeId, usize> = BTreeMap::new();
    for &x in &internal {
        let kids = tree
            .neighbors(x)
            .iter()
            .filter(|&&y| oriented.parent_of(y) == Some(x) && internal.contains(&y))
            .count();
        pending_children.insert(x, kids);
    }
    let mut ready: Vec<NodeId> = internal
        .iter()
        .copied()
        .filter(|x| pending_children[x] == 0)
        .collect();
    let mut order = Vec::with_capacity(internal.len());
    while !ready.is_empty() {
        ready.shuffle(rng);
        let x = ready.pop().expect("nonempty");
        order.push(x);
        if let Some(p) = oriented.parent_of(x) {
            if internal.contains(&p) {
                let slot = pending_children.get_mut(&p).expect("tracked");
                *slot -= 1;
                if *slot == 0 {
                    ready.push(p);
                }
            }
        }
    }
    Ok(order)
}

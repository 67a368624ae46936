//! Wire routings through a contraction tree and the resulting congestions.
//!
//! Every network edge routes along the minimal subtree spanning the leaves of
//! its endpoints (a path for ordinary wires, the Steiner subtree for
//! hyperedges). A tree node or tree edge accumulates the weight of every
//! routing that includes it; the exponential of a node's congestion is the
//! exact multiply-add count of the contraction at that node.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Network};
use crate::tree::{tree_edge, ContractionTree, NodeId, TreeEdge};

/// The minimal subtree carrying one network edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Routing {
    pub edge: EdgeId,
    pub subtree_nodes: BTreeSet<NodeId>,
    pub subtree_edges: BTreeSet<TreeEdge>,
}

/// Per-node and per-tree-edge congestions, in log2 and exact-product form.
/// Comparisons and maxima use the exact integers.
#[derive(Debug, Clone)]
pub struct CongestionMap {
    pub node_con: BTreeMap<NodeId, f64>,
    pub tree_edge_con: BTreeMap<TreeEdge, f64>,
    pub node_cost: BTreeMap<NodeId, u128>,
    pub tree_edge_cost: BTreeMap<TreeEdge, u128>,
    /// Routing counts, ignoring weights (the unweighted congestion used by
    /// the decomposition bridge).
    pub node_count: BTreeMap<NodeId, usize>,
    pub tree_edge_count: BTreeMap<TreeEdge, usize>,
}

impl CongestionMap {
    /// Maximum node congestion (log2), tie-broken by the exact cost.
    pub fn vertcon(&self) -> f64 {
        (self.vertcon_cost() as f64).log2()
    }

    pub fn edgecon(&self) -> f64 {
        (self.edgecon_cost() as f64).log2()
    }

    pub fn vertcon_cost(&self) -> u128 {
        self.node_cost.values().copied().max().unwrap_or(1)
    }

    pub fn edgecon_cost(&self) -> u128 {
        self.tree_edge_cost.values().copied().max().unwrap_or(1)
    }

    /// Maximum unweighted node congestion (routing count).
    pub fn vertcon_count(&self) -> usize {
        self.node_count.values().copied().max().unwrap_or(0)
    }

    pub fn edgecon_count(&self) -> usize {
        self.tree_edge_count.values().copied().max().unwrap_or(0)
    }
}

/// Routings of every network edge through the tree.
pub fn compute_routings(net: &Network, tree: &ContractionTree) -> Result<Vec<Routing>> {
    tree.validate(net)?;
    net.edges().map(|edge| routing_of(net, tree, edge.id)).collect()
}

fn routing_of(net: &Network, tree: &ContractionTree, edge: EdgeId) -> Result<Routing> {
    let endpoints = &net.edge(edge).expect("validated edge").endpoints;
    let leaves: Vec<NodeId> = endpoints
        .iter()
        .map(|&v| {
            tree.leaf_for(v).ok_or_else(|| {
                Error::LeafMismatch(format!("vertex `{}` has no leaf", net.name(v)))
            })
        })
        .collect::<Result<_>>()?;
    if leaves.len() == 1 {
        return Ok(Routing {
            edge,
            subtree_nodes: BTreeSet::from([leaves[0]]),
            subtree_edges: BTreeSet::new(),
        });
    }
    // Steiner subtree in a tree: union of pairwise paths = edges (x, parent x)
    // with at least one terminal strictly below x and one outside.
    let anchor = leaves[0];
    let mut parent: Vec<Option<NodeId>> = vec![None; tree.node_count()];
    let mut order = Vec::with_capacity(tree.node_count());
    let mut stack = vec![anchor];
    let mut seen = vec![false; tree.node_count()];
    seen[anchor.index()] = true;
    while let Some(x) = stack.pop() {
        order.push(x);
        for &y in tree.neighbors(x) {
            if !seen[y.index()] {
                seen[y.index()] = true;
                parent[y.index()] = Some(x);
                stack.push(y);
            }
        }
    }
    let terminal: BTreeSet<NodeId> = leaves.iter().copied().collect();
    let total = terminal.len();
    let mut below = vec![0usize; tree.node_count()];
    for &x in order.iter().rev() {
        if terminal.contains(&x) {
            below[x.index()] += 1;
        }
        if let Some(p) = parent[x.index()] {
            below[p.index()] += below[x.index()];
        }
    }
    let mut subtree_nodes = BTreeSet::new();
    let mut subtree_edges = BTreeSet::new();
    for x in tree.nodes() {
        if let Some(p) = parent[x.index()] {
            if below[x.index()] > 0 && below[x.index()] < total {
                subtree_edges.insert(tree_edge(x, p));
                subtree_nodes.insert(x);
                subtree_nodes.insert(p);
            }
        }
    }
    subtree_nodes.extend(terminal);
    Ok(Routing { edge, subtree_nodes, subtree_edges })
}

/// Congestion of every node and tree edge. Hyperedges contribute their weight
/// once per node or edge of their Steiner subtree.
pub fn congestion(net: &Network, tree: &ContractionTree) -> Result<CongestionMap> {
    let routings = compute_routings(net, tree)?;
    congestion_from_routings(net, tree, &routings)
}

pub fn congestion_from_routings(
    net: &Network,
    tree: &ContractionTree,
    routings: &[Routing],
) -> Result<CongestionMap> {
    let mut map = CongestionMap {
        node_con: tree.nodes().map(|x| (x, 0.0)).collect(),
        tree_edge_con: tree.tree_edges().into_iter().map(|f| (f, 0.0)).collect(),
        node_cost: tree.nodes().map(|x| (x, 1u128)).collect(),
        tree_edge_cost: tree.tree_edges().into_iter().map(|f| (f, 1u128)).collect(),
        node_count: tree.nodes().map(|x| (x, 0usize)).collect(),
        tree_edge_count: tree.tree_edges().into_iter().map(|f| (f, 0usize)).collect(),
    };
    for routing in routings {
        let edge = net.edge(routing.edge).expect("routing of a live edge");
        let weight = edge.weight();
        let dim = edge.dim as u128;
        for &x in &routing.subtree_nodes {
            *map.node_con.get_mut(&x).expect("node") += weight;
            let cost = map.node_cost.get_mut(&x).expect("node");
            *cost = cost
                .checked_mul(dim)
                .ok_or_else(|| Error::Overflow(format!("congestion at node {}", x.index())))?;
            *map.node_count.get_mut(&x).expect("node") += 1;
        }
        for &f in &routing.subtree_edges {
            *map.tree_edge_con.get_mut(&f).expect("edge") += weight;
            let cost = map.tree_edge_cost.get_mut(&f).expect("edge");
            *cost = cost.checked_mul(dim).ok_or_else(|| {
                Error::Overflow(format!("congestion at tree edge ({},{})", f.0.index(), f.1.index()))
            })?;
            *map.tree_edge_count.get_mut(&f).expect("edge") += 1;
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Network, VertexId};
    use crate::tree::tree_from_order;
    use std::collections::BTreeSet as Set;

    fn set(vs: &[VertexId]) -> Set<VertexId> {
        vs.iter().copied().collect()
    }

    /// Brute-force containment oracle: recompute congestion by checking, for
    /// every (edge, node) pair, whether the node lies on a path between two
    /// endpoint leaves.
    fn oracle_counts(
        net: &Network,
        tree: &ContractionTree,
    ) -> (BTreeMap<NodeId, usize>, BTreeMap<TreeEdge, usize>) {
        let mut node_count: BTreeMap<NodeId, usize> = tree.nodes().map(|x| (x, 0)).collect();
        let mut edge_count: BTreeMap<TreeEdge, usize> =
            tree.tree_edges().into_iter().map(|f| (f, 0)).collect();
        for edge in net.edges() {
            let leaves: Vec<NodeId> =
                edge.endpoints.iter().map(|&v| tree.leaf_for(v).unwrap()).collect();
            let mut nodes: Set<NodeId> = Set::new();
            let mut edges: Set<TreeEdge> = Set::new();
            for i in 0..leaves.len() {
                for j in i + 1..leaves.len() {
                    let path = tree.path(leaves[i], leaves[j]);
                    nodes.extend(path.iter().copied());
                    for w in path.windows(2) {
                        edges.insert(tree_edge(w[0], w[1]));
                    }
                }
            }
            if leaves.len() == 1 {
                nodes.insert(leaves[0]);
            }
            for x in nodes {
                *node_count.get_mut(&x).unwrap() += 1;
            }
            for f in edges {
                *edge_count.get_mut(&f).unwrap() += 1;
            }
        }
        (node_count, edge_count)
    }

    #[test]
    fn leaf_congestion_is_weighted_degree() {
        let mut net = Network::new();
        let vs: Vec<_> =
            ["a", "b", "c"].iter().map(|n| net.add_vertex(n).unwrap()).collect();
        net.add_edge(2, &[vs[0], vs[1]]).unwrap();
        net.add_edge(4, &[vs[1], vs[2]]).unwrap();
        net.add_edge(8, &[vs[0], vs[2]]).unwrap();
        let tree = tree_from_order(
            &net,
            &[(set(&[vs[0]]), set(&[vs[1]])), (set(&[vs[0], vs[1]]), set(&[vs[2]]))],
        )
        .unwrap();
        let con = congestion(&net, &tree).unwrap();
        for &v in &vs {
            let leaf = tree.leaf_for(v).unwrap();
            assert_eq!(con.node_con[&leaf], net.weighted_degree(v).unwrap());
        }
    }

    #[test]
    fn triangle_congestion_on_unique_tree() {
        // a-b(2), b-c(4), a-c(8) on the single unrooted 3-leaf tree
        let mut net = Network::new();
        let a = net.add_vertex("a").unwrap();
        let b = net.add_vertex("b").unwrap();
        let c = net.add_vertex("c").unwrap();
        net.add_edge(2, &[a, b]).unwrap();
        net.add_edge(4, &[b, c]).unwrap();
        net.add_edge(8, &[a, c]).unwrap();
        let tree = tree_from_order(&net, &[(set(&[a]), set(&[b])), (set(&[a, b]), set(&[c]))])
            .unwrap()
            .unroot()
            .unwrap();
        assert_eq!(tree.node_count(), 4);
        let con = congestion(&net, &tree).unwrap();
        let center = tree.internal_nodes()[0];
        assert_eq!(con.node_cost[&center], 64);
        assert_eq!(con.node_cost[&tree.leaf_for(a).unwrap()], 16);
        assert_eq!(con.node_cost[&tree.leaf_for(b).unwrap()], 8);
        assert_eq!(con.node_cost[&tree.leaf_for(c).unwrap()], 32);
        assert_eq!(con.vertcon_cost(), 64);
        assert_eq!(con.vertcon(), 6.0);
        // oracle cross-check
        let (nodes, edges) = oracle_counts(&net, &tree);
        assert_eq!(nodes, con.node_count);
        assert_eq!(edges, con.tree_edge_count);
    }

    #[test]
    fn path_caterpillar_costs() {
        // a-b-c-d all dims 2, tree ((a,b),(c,d))
        let mut net = Network::new();
        let vs: Vec<_> =
            ["a", "b", "c", "d"].iter().map(|n| net.add_vertex(n).unwrap()).collect();
        net.add_edge(2, &[vs[0], vs[1]]).unwrap();
        net.add_edge(2, &[vs[1], vs[2]]).unwrap();
        net.add_edge(2, &[vs[2], vs[3]]).unwrap();
        let rooted = tree_from_order(
            &net,
            &[
                (set(&[vs[0]]), set(&[vs[1]])),
                (set(&[vs[2]]), set(&[vs[3]])),
                (set(&[vs[0], vs[1]]), set(&[vs[2], vs[3]])),
            ],
        )
        .unwrap();
        let tree = rooted.unroot().unwrap();
        let con = congestion(&net, &tree).unwrap();
        // internal node joining a,b carries edges ab and bc: cost 4
        let join_ab = tree
            .internal_nodes()
            .into_iter()
            .find(|&x| {
                tree.neighbors(x).contains(&tree.leaf_for(vs[0]).unwrap())
                    && tree.neighbors(x).contains(&tree.leaf_for(vs[1]).unwrap())
            })
            .unwrap();
        assert_eq!(con.node_cost[&join_ab], 4);
        // central tree edge carries only bc: cost 2
        let internals: Vec<NodeId> = tree.internal_nodes();
        let central = tree_edge(internals[0], internals[1]);
        assert_eq!(con.tree_edge_cost[&central], 2);
        let (nodes, edges) = oracle_counts(&net, &tree);
        assert_eq!(nodes, con.node_count);
        assert_eq!(edges, con.tree_edge_count);
    }

    #[test]
    fn routing_of_sibling_leaves_is_short_path() {
        let mut net = Network::new();
        let a = net.add_vertex("a").unwrap();
        let b = net.add_vertex("b").unwrap();
        net.add_edge(3, &[a, b]).unwrap();
        let tree = tree_from_order(&net, &[(set(&[a]), set(&[b]))]).unwrap();
        let routings = compute_routings(&net, &tree).unwrap();
        assert_eq!(routings.len(), 1);
        // two leaves joined through one internal node: 3 nodes, 2 tree edges
        assert_eq!(routings[0].subtree_nodes.len(), 3);
        assert_eq!(routings[0].subtree_edges.len(), 2);

        let unrooted = tree.unroot().unwrap();
        let routings = compute_routings(&net, &unrooted).unwrap();
        assert_eq!(routings[0].subtree_nodes.len(), 2);
        assert_eq!(routings[0].subtree_edges.len(), 1);
    }

    #[test]
    fn hyperedge_routing_is_steiner_subtree() {
        // 4 vertices, hyperedge over three of them, balanced tree
        let mut net = Network::new();
        let vs: Vec<_> =
            ["a", "b", "c", "d"].iter().map(|n| net.add_vertex(n).unwrap()).collect();
        net.add_edge(2, &[vs[0], vs[1], vs[2]]).unwrap();
        let rooted = tree_from_order(
            &net,
            &[
                (set(&[vs[0]]), set(&[vs[1]])),
                (set(&[vs[2]]), set(&[vs[3]])),
                (set(&[vs[0], vs[1]]), set(&[vs[2], vs[3]])),
            ],
        )
        .unwrap();
        let tree = rooted.unroot().unwrap();
        // oracle: the minimal connected subtree spanning the three leaves.
        // Exhaustively check it is contained in every pairwise-path union.
        let routings = compute_routings(&net, &tree).unwrap();
        let r = &routings[0];
        assert_eq!(r.subtree_nodes.len(), 5);
        assert_eq!(r.subtree_edges.len(), 4);
        let (nodes, edges) = oracle_counts(&net, &tree);
        let con = congestion(&net, &tree).unwrap();
        assert_eq!(nodes, con.node_count);
        assert_eq!(edges, con.tree_edge_count);
        // the hyperedge counts once at the branch node
        for (_, &c) in con.node_count.iter() {
            assert!(c <= 1);
        }
    }

    #[test]
    fn congestion_oracle_on_random_networks() {
        use crate::tree::random_unrooted_tree;
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for case in 0..60 {
            let n = rng.gen_range(2..=6);
            let mut net = Network::new();
            let vs: Vec<_> =
                (0..n).map(|i| net.add_vertex(&format!("v{i}")).unwrap()).collect();
            for i in 1..n {
                let j = rng.gen_range(0..i);
                net.add_edge(rng.gen_range(2..=4), &[vs[i], vs[j]]).unwrap();
            }
            for _ in 0..rng.gen_range(0..3) {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(0..n);
                if i != j && n >= 2 {
                    let _ = net.add_edge(rng.gen_range(2..=4), &[vs[i], vs[j]]);
                }
            }
            if n >= 3 && case % 3 == 0 {
                net.add_edge(2, &[vs[0], vs[1], vs[2]]).unwrap();
            }
            let tree = random_unrooted_tree(&net, &mut rng).unwrap();
            let con = congestion(&net, &tree).unwrap();
            let (nodes, edges) = oracle_counts(&net, &tree);
            assert_eq!(nodes, con.node_count);
            assert_eq!(edges, con.tree_edge_count);
        }
    }

    #[test]
    fn rooting_preserves_congestions() {
        use crate::tree::random_unrooted_tree;
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut net = Network::new();
        let vs: Vec<_> = (0..5).map(|i| net.add_vertex(&format!("v{i}")).unwrap()).collect();
        for i in 0..5 {
            net.add_edge(2 + i as u64 % 3, &[vs[i], vs[(i + 1) % 5]]).unwrap();
        }
        for _ in 0..10 {
            let unrooted = random_unrooted_tree(&net, &mut rng).unwrap();
            let before = congestion(&net, &unrooted).unwrap();
            for at in unrooted.tree_edges() {
                let rooted = unrooted.root_at(at).unwrap();
                let after = congestion(&net, &rooted).unwrap();
                assert_eq!(before.vertcon_cost(), after.vertcon_cost());
                assert_eq!(before.edgecon_cost(), after.edgecon_cost());
                // both halves of the split edge carry the old congestion
                let split_cost = before.tree_edge_cost[&at];
                let w = rooted
                    .internal_nodes()
                    .into_iter()
                    .find(|&x| rooted.neighbors(x).contains(&rooted.root().unwrap()))
                    .unwrap();
                assert_eq!(after.node_cost[&w], split_cost);
                let halves: Vec<u128> = rooted
                    .neighbors(w)
                    .iter()
                    .filter(|&&y| Some(y) != rooted.root().map(|r| r))
                    .map(|&y| after.tree_edge_cost[&tree_edge(w, y)])
                    .collect();
                assert_eq!(halves, vec![split_cost, split_cost]);
            }
        }
    }
}

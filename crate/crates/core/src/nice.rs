//! Normalization of a tree decomposition into the rooted binary form the
//! dynamic program consumes: leaf / introduce-vertex / introduce-edge /
//! forget / join nodes, with the source and sink kept in every bag and
//! exactly one introduce-edge node per graph edge.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexId};
use crate::treedecomp::{validate_td, TreeDecomposition};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    /// Bag is exactly {s, t}; s and t count as introduced here.
    Leaf,
    IntroduceVertex(VertexId),
    Forget(VertexId),
    /// Bag unchanged from the child; both endpoints are in the bag.
    IntroduceEdge(EdgeId),
    Join,
}

#[derive(Debug, Clone)]
pub struct NiceNode {
    pub kind: NodeKind,
    /// Sorted bag contents.
    pub bag: Vec<VertexId>,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct NiceTd {
    pub nodes: Vec<NiceNode>,
    pub root: usize,
    pub source: VertexId,
    pub sink: VertexId,
}

impl NiceTd {
    pub fn width(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| n.bag.len())
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    /// Node ids in an order where children precede parents.
    pub fn postorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                order.push(v);
            } else {
                stack.push((v, true));
                for &c in &self.nodes[v].children {
                    stack.push((c, false));
                }
            }
        }
        order
    }

    /// Checks every structural rule, and that recomputing the introduced
    /// vertex/edge sets bottom-up reaches all of `g` at the root.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidNiceDecomposition(msg));
        if self.root >= self.nodes.len() {
            return fail("root out of range".into());
        }
        let mut edge_intro_count = vec![0usize; g.num_edges()];
        let mut vertex_sets: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); self.nodes.len()];
        let mut edge_sets: Vec<BTreeSet<EdgeId>> = vec![BTreeSet::new(); self.nodes.len()];
        for &id in &self.postorder() {
            let node = &self.nodes[id];
            let bag: BTreeSet<VertexId> = node.bag.iter().copied().collect();
            if bag.len() != node.bag.len() || node.bag.windows(2).any(|w| w[0] >= w[1]) {
                return fail(format!("node {id}: bag not sorted/unique"));
            }
            if !bag.contains(&self.source) || !bag.contains(&self.sink) {
                return fail(format!("node {id}: bag misses source or sink"));
            }
            let kid_bags: Vec<BTreeSet<VertexId>> = node
                .children
                .iter()
                .map(|&c| self.nodes[c].bag.iter().copied().collect())
                .collect();
            let mut vs = BTreeSet::new();
            let mut es = BTreeSet::new();
            for &c in &node.children {
                vs.extend(vertex_sets[c].iter().copied());
                es.extend(edge_sets[c].iter().copied());
            }
            match node.kind {
                NodeKind::Leaf => {
                    if !node.children.is_empty() {
                        return fail(format!("node {id}: leaf with children"));
                    }
                    if bag.len() != 2 {
                        return fail(format!("node {id}: leaf bag must be exactly {{s,t}}"));
                    }
                    vs.insert(self.source);
                    vs.insert(self.sink);
                }
                NodeKind::IntroduceVertex(v) => {
                    if node.children.len() != 1 {
                        return fail(format!("node {id}: introduce-vertex arity"));
                    }
                    let child = &kid_bags[0];
                    if !bag.contains(&v)
                        || child.contains(&v)
                        || !child.is_subset(&bag)
                        || bag.len() != child.len() + 1
                    {
                        return fail(format!("node {id}: introduce-vertex bag mismatch"));
                    }
                    if vs.contains(&v) {
                        return fail(format!("node {id}: vertex {v} reintroduced while live"));
                    }
                    vs.insert(v);
                }
                NodeKind::Forget(v) => {
                    if node.children.len() != 1 {
                        return fail(format!("node {id}: forget arity"));
                    }
                    let child = &kid_bags[0];
                    if bag.contains(&v)
                        || !child.contains(&v)
                        || !bag.is_subset(child)
                        || child.len() != bag.len() + 1
                    {
                        return fail(format!("node {id}: forget bag mismatch"));
                    }
                }
                NodeKind::IntroduceEdge(e) => {
                    if node.children.len() != 1 {
                        return fail(format!("node {id}: introduce-edge arity"));
                    }
                    if e >= g.num_edges() {
                        return fail(format!("node {id}: unknown edge {e}"));
                    }
                    let (a, b) = g.endpoints(e);
                    if !bag.contains(&a) || !bag.contains(&b) {
                        return fail(format!("node {id}: edge {e} endpoints not in bag"));
                    }
                    if bag != kid_bags[0] {
                        return fail(format!("node {id}: introduce-edge bag changed"));
                    }
                    edge_intro_count[e] += 1;
                    es.insert(e);
                }
                NodeKind::Join => {
                    if node.children.len() != 2 {
                        return fail(format!("node {id}: join arity"));
                    }
                    if kid_bags[0] != bag || kid_bags[1] != bag {
                        return fail(format!("node {id}: join bags differ"));
                    }
                }
            }
            vertex_sets[id] = vs;
            edge_sets[id] = es;
        }
        for (e, c) in edge_intro_count.iter().enumerate() {
            if *c != 1 {
                return fail(format!("edge {e} introduced {c} times"));
            }
        }
        if vertex_sets[self.root].len() != g.num_vertices() {
            return fail("root does not cover all vertices".into());
        }
        if edge_sets[self.root].len() != g.num_edges() {
            return fail("root does not cover all edges".into());
        }
        Ok(())
    }
}

struct Builder {
    nodes: Vec<NiceNode>,
}

impl Builder {
    fn push(&mut self, kind: NodeKind, bag: Vec<VertexId>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode {
            kind,
            bag,
            children,
        });
        self.nodes.len() - 1
    }
}

/// Turns a valid tree decomposition of `g` into the rooted binary nice form,
/// adding `s` and `t` to every bag (width grows by at most 2).
///
/// Each graph edge is introduced at the deepest original node whose
/// (augmented) bag contains both endpoints, right where that node's bag is
/// fully assembled; this keeps subtrees small.
pub fn make_nice_with_edges(
    g: &Graph,
    td: &TreeDecomposition,
    s: VertexId,
    t: VertexId,
) -> Result<NiceTd> {
    validate_td(g, td)?;
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    assert_ne!(s, t);

    let bags: Vec<BTreeSet<VertexId>> = td
        .bags
        .iter()
        .map(|b| {
            let mut b = b.clone();
            b.insert(s);
            b.insert(t);
            b
        })
        .collect();
    let n_orig = bags.len();
    let adj = td.tree_adj();
    let root_orig = td.root.unwrap_or(0);

    // Root the original tree: parent pointers + children lists + depth.
    let mut parent = vec![usize::MAX; n_orig];
    let mut depth = vec![0usize; n_orig];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n_orig];
    let mut order = Vec::with_capacity(n_orig);
    {
        let mut stack = vec![root_orig];
        let mut seen = vec![false; n_orig];
        seen[root_orig] = true;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = v;
                    depth[w] = depth[v] + 1;
                    children[v].push(w);
                    stack.push(w);
                }
            }
        }
    }

    // Assign each edge to the deepest original node whose bag contains both
    // endpoints (ties to the smallest node id).
    let mut assigned: Vec<Vec<EdgeId>> = vec![Vec::new(); n_orig];
    for (e, a, b, _) in g.edges() {
        let mut best: Option<(usize, usize)> = None; // (depth, node)
        for (i, bag) in bags.iter().enumerate() {
            if bag.contains(&a) && bag.contains(&b) {
                let key = (depth[i], usize::MAX - i);
                if best.map_or(true, |(d, k)| key > (d, k)) {
                    best = Some(key);
                }
            }
        }
        let (_, inv) = best.expect("validated decomposition covers every edge");
        assigned[usize::MAX - inv].push(e);
    }
    for list in &mut assigned {
        list.sort_unstable();
    }

    let mut b = Builder { nodes: Vec::new() };

    // Expand original nodes bottom-up (children before parents).
    let mut top_of: Vec<usize> = vec![usize::MAX; n_orig];
    for &rho in order.iter().rev() {
        let bag_sorted: Vec<VertexId> = bags[rho].iter().copied().collect();
        let mut parts: Vec<usize> = Vec::new();
        for &c in &children[rho] {
            // Morph the child's top (bag B_c) into bag B_rho:
            // forget B_c \ B_rho, then introduce B_rho \ B_c.
            let mut cur = top_of[c];
            let mut cur_bag = bags[c].clone();
            for &v in bags[c].difference(&bags[rho]) {
                cur_bag.remove(&v);
                cur = b.push(
                    NodeKind::Forget(v),
                    cur_bag.iter().copied().collect(),
                    vec![cur],
                );
            }
            for &v in bags[rho].difference(&bags[c]) {
                cur_bag.insert(v);
                cur = b.push(
                    NodeKind::IntroduceVertex(v),
                    cur_bag.iter().copied().collect(),
                    vec![cur],
                );
            }
            parts.push(cur);
        }
        let mut top = if parts.is_empty() {
            // Fresh leaf chain: {s,t}, then introduce the rest of the bag.
            let mut leaf_bag: Vec<VertexId> = vec![s.min(t), s.max(t)];
            let mut cur = b.push(NodeKind::Leaf, leaf_bag.clone(), vec![]);
            let mut cur_bag: BTreeSet<VertexId> = leaf_bag.drain(..).collect();
            for &v in &bag_sorted {
                if cur_bag.insert(v) {
                    cur = b.push(
                        NodeKind::IntroduceVertex(v),
                        cur_bag.iter().copied().collect(),
                        vec![cur],
                    );
                }
            }
            cur
        } else {
            // Fold children with joins (bags all equal B_rho here).
            let mut cur = parts[0];
            for &next in &parts[1..] {
                cur = b.push(NodeKind::Join, bag_sorted.clone(), vec![cur, next]);
            }
            cur
        };
        for &e in &assigned[rho] {
            top = b.push(NodeKind::IntroduceEdge(e), bag_sorted.clone(), vec![top]);
        }
        top_of[rho] = top;
    }

    // Shrink the root bag to {s,t} so the answer is read off a tiny table.
    let mut cur = top_of[root_orig];
    let mut cur_bag = bags[root_orig].clone();
    let extra: Vec<VertexId> = cur_bag
        .iter()
        .copied()
        .filter(|&v| v != s && v != t)
        .collect();
    for v in extra {
        cur_bag.remove(&v);
        cur = b.push(
            NodeKind::Forget(v),
            cur_bag.iter().copied().collect(),
            vec![cur],
        );
    }
    let nice = NiceTd {
        nodes: b.nodes,
        root: cur,
        source: s,
        sink: t,
    };
    debug_assert!(nice.validate(g).is_ok());
    Ok(nice)
}

//! Unit-capacity s-t flow, edge-disjoint path extraction, and brute-force
//! enumeration of small minimal cuts and separators.

use std::collections::{BTreeSet, VecDeque};

use itertools::Itertools;

use crate::error::{Result, WorkBudget};
use crate::graph::{EdgeId, Graph, VertexId};

/// Value of a unit-capacity flow. `Infinite` marks the degenerate case where
/// source and sink have been merged by a contraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowValue {
    Finite(usize),
    Infinite,
}

impl FlowValue {
    pub fn at_least(&self, p: usize) -> bool {
        match self {
            FlowValue::Infinite => true,
            FlowValue::Finite(v) => *v >= p,
        }
    }

    pub fn finite(&self) -> Option<usize> {
        match self {
            FlowValue::Finite(v) => Some(*v),
            FlowValue::Infinite => None,
        }
    }
}

/// Internal flow state: per edge a direction in {-1, 0, +1} relative to the
/// stored endpoint order. Parallel edges each carry one unit.
struct FlowState<'a> {
    g: &'a Graph,
    flow: Vec<i8>,
}

impl<'a> FlowState<'a> {
    fn new(g: &'a Graph) -> Self {
        FlowState {
            g,
            flow: vec![0; g.num_edges()],
        }
    }

    /// Residual capacity of edge `e` traversed from `from`.
    fn residual(&self, e: EdgeId, from: VertexId) -> i8 {
        let (a, _) = self.g.endpoints(e);
        if from == a {
            1 - self.flow[e]
        } else {
            1 + self.flow[e]
        }
    }

    fn push(&mut self, e: EdgeId, from: VertexId) {
        let (a, _) = self.g.endpoints(e);
        if from == a {
            self.flow[e] += 1;
        } else {
            self.flow[e] -= 1;
        }
    }

    /// BFS augmenting path; returns false if none exists.
    fn augment(&mut self, s: VertexId, t: VertexId) -> bool {
        let n = self.g.num_vertices();
        let mut pred: Vec<Option<(VertexId, EdgeId)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = VecDeque::new();
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            if v == t {
                break;
            }
            for &(w, e) in self.g.neighbors(v) {
                if !seen[w] && self.residual(e, v) > 0 {
                    seen[w] = true;
                    pred[w] = Some((v, e));
                    queue.push_back(w);
                }
            }
        }
        if !seen[t] {
            return false;
        }
        let mut v = t;
        while v != s {
            let (u, e) = pred[v].unwrap();
            self.push(e, u);
            v = u;
        }
        true
    }

    /// Vertices reachable from `s` in the residual graph; the out-edges of
    /// this set form a minimum cut.
    fn residual_reachable(&self, s: VertexId) -> Vec<bool> {
        let mut seen = vec![false; self.g.num_vertices()];
        seen[s] = true;
        let mut queue = VecDeque::new();
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &(w, e) in self.g.neighbors(v) {
                if !seen[w] && self.residual(e, v) > 0 {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }
}

/// Max-flow value with unit capacities, optionally stopping once `cap`
/// augmenting paths have been found.
pub fn max_flow_value_capped(
    g: &Graph,
    s: VertexId,
    t: VertexId,
    cap: Option<usize>,
) -> Result<FlowValue> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    if s == t {
        return Ok(FlowValue::Infinite);
    }
    let mut st = FlowState::new(g);
    let mut value = 0;
    while cap.map_or(true, |c| value < c) {
        if !st.augment(s, t) {
            break;
        }
        value += 1;
    }
    Ok(FlowValue::Finite(value))
}

pub fn max_flow_value(g: &Graph, s: VertexId, t: VertexId) -> Result<FlowValue> {
    max_flow_value_capped(g, s, t, None)
}

/// A path as both a vertex sequence and the edge ids it uses; the edge ids
/// disambiguate parallel edges.
#[derive(Debug, Clone)]
pub struct EdgePath {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

/// `p` pairwise edge-disjoint s-t paths, or None when the flow value is
/// below `p`. Paths are decomposed from an integral flow.
pub fn edge_disjoint_paths(
    g: &Graph,
    s: VertexId,
    t: VertexId,
    p: usize,
) -> Result<Option<Vec<EdgePath>>> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    assert_ne!(s, t, "merged endpoints have no path decomposition");
    let mut st = FlowState::new(g);
    let mut value = 0;
    while value < p && st.augment(s, t) {
        value += 1;
    }
    if value < p {
        return Ok(None);
    }
    // Decompose: repeatedly BFS inside the flow support and consume the path.
    let mut paths = Vec::with_capacity(p);
    for _ in 0..p {
        let n = g.num_vertices();
        let mut pred: Vec<Option<(VertexId, EdgeId)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = VecDeque::new();
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            if v == t {
                break;
            }
            for &(w, e) in g.neighbors(v) {
                // Follow only arcs carrying flow out of v.
                let (a, _) = g.endpoints(e);
                let carries = if v == a {
                    st.flow[e] == 1
                } else {
                    st.flow[e] == -1
                };
                if carries && !seen[w] {
                    seen[w] = true;
                    pred[w] = Some((v, e));
                    queue.push_back(w);
                }
            }
        }
        assert!(seen[t], "flow decomposition ran out of paths");
        let mut vertices = vec![t];
        let mut edges = Vec::new();
        let mut v = t;
        while v != s {
            let (u, e) = pred[v].unwrap();
            st.flow[e] = 0;
            vertices.push(u);
            edges.push(e);
            v = u;
        }
        vertices.reverse();
        edges.reverse();
        paths.push(EdgePath { vertices, edges });
    }
    Ok(Some(paths))
}

/// Edges crossing the residual-reachable side of a maximum flow: a minimum
/// s-t cut, deterministic for a fixed graph.
pub fn minimum_cut(g: &Graph, s: VertexId, t: VertexId) -> Result<Vec<EdgeId>> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    assert_ne!(s, t);
    let mut st = FlowState::new(g);
    while st.augment(s, t) {}
    let side = st.residual_reachable(s);
    let mut cut: Vec<EdgeId> = g
        .edges()
        .filter(|&(_, a, b, _)| side[a] != side[b])
        .map(|(e, _, _, _)| e)
        .collect();
    cut.sort_unstable();
    Ok(cut)
}

fn is_st_cut(g: &Graph, s: VertexId, t: VertexId, cut: &BTreeSet<EdgeId>) -> bool {
    let removed: Vec<EdgeId> = cut.iter().copied().collect();
    !g.reachable_avoiding(s, &[], &removed)[t]
}

/// True iff `cut` disconnects s from t and no proper subset does. Probing
/// each single deletion suffices: supersets of cuts are cuts.
pub fn is_minimal_st_cut(g: &Graph, s: VertexId, t: VertexId, cut: &BTreeSet<EdgeId>) -> bool {
    if !is_st_cut(g, s, t, cut) {
        return false;
    }
    for &e in cut {
        let mut sub = cut.clone();
        sub.remove(&e);
        if is_st_cut(g, s, t, &sub) {
            return false;
        }
    }
    true
}

fn is_st_separator(g: &Graph, s: VertexId, t: VertexId, sep: &BTreeSet<VertexId>) -> bool {
    let removed: Vec<VertexId> = sep.iter().copied().collect();
    !g.reachable_avoiding(s, &removed, &[])[t]
}

pub fn is_minimal_st_separator(
    g: &Graph,
    s: VertexId,
    t: VertexId,
    sep: &BTreeSet<VertexId>,
) -> bool {
    if sep.contains(&s) || sep.contains(&t) || !is_st_separator(g, s, t, sep) {
        return false;
    }
    for &v in sep {
        let mut sub = sep.clone();
        sub.remove(&v);
        if is_st_separator(g, s, t, &sub) {
            return false;
        }
    }
    true
}

fn subsets_to_examine(pool: usize, max_size: usize) -> u128 {
    let mut total: u128 = 0;
    for k in 0..=max_size.min(pool) {
        let mut c: u128 = 1;
        for i in 0..k {
            c = c.saturating_mul((pool - i) as u128) / (i as u128 + 1);
        }
        total = total.saturating_add(c);
    }
    total
}

/// All inclusion-minimal s-t cuts of size at most `limit`, each exactly once,
/// ordered by size then lexicographically. Brute force over edge subsets
/// guarded by `budget`.
pub fn enumerate_minimal_cuts_upto(
    g: &Graph,
    s: VertexId,
    t: VertexId,
    limit: usize,
    budget: WorkBudget,
) -> Result<Vec<BTreeSet<EdgeId>>> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    budget.check(
        subsets_to_examine(g.num_edges(), limit),
        "enumerating minimal cuts",
    )?;
    let ids: Vec<EdgeId> = (0..g.num_edges()).collect();
    let mut out = Vec::new();
    for size in 0..=limit.min(ids.len()) {
        for combo in ids.iter().copied().combinations(size) {
            let cand: BTreeSet<EdgeId> = combo.into_iter().collect();
            if is_minimal_st_cut(g, s, t, &cand) {
                out.push(cand);
            }
        }
    }
    Ok(out)
}

/// All inclusion-minimal s-t vertex separators of size at most `limit`
/// (never containing s or t), ordered by size then lexicographically.
pub fn enumerate_minimal_separators_upto(
    g: &Graph,
    s: VertexId,
    t: VertexId,
    limit: usize,
    budget: WorkBudget,
) -> Result<Vec<BTreeSet<VertexId>>> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    let pool: Vec<VertexId> = (0..g.num_vertices())
        .filter(|&v| v != s && v != t)
        .collect();
    budget.check(
        subsets_to_examine(pool.len(), limit),
        "enumerating minimal separators",
    )?;
    let mut out = Vec::new();
    for size in 0..=limit.min(pool.len()) {
        for combo in pool.iter().copied().combinations(size) {
            let cand: BTreeSet<VertexId> = combo.into_iter().collect();
            if is_st_separator(g, s, t, &cand) && is_minimal_st_separator(g, s, t, &cand) {
                out.push(cand);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    pub(crate) fn four_cycle() -> Graph {
        // s=0, a=1, t=2, b=3
        Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)])
    }

    /// s,a,b,c,d,e,t with edges s-a, s-c, a-c, a-b, c-b, c-d, d-e, e-t, b-t.
    pub(crate) fn example_graph() -> (Graph, VertexId, VertexId) {
        // ids: s=0, a=1, b=2, c=3, d=4, e=5, t=6
        let g = Graph::from_edges(
            7,
            &[
                (0, 1),
                (0, 3),
                (1, 3),
                (1, 2),
                (3, 2),
                (3, 4),
                (4, 5),
                (5, 6),
                (2, 6),
            ],
        );
        (g, 0, 6)
    }

    #[test]
    fn flow_single_edge() {
        let g = Graph::from_edges(2, &[(0, 1)]);
        assert_eq!(max_flow_value(&g, 0, 1).unwrap(), FlowValue::Finite(1));
    }

    #[test]
    fn flow_four_cycle() {
        assert_eq!(
            max_flow_value(&four_cycle(), 0, 2).unwrap(),
            FlowValue::Finite(2)
        );
    }

    #[test]
    fn flow_example_graph() {
        let (g, s, t) = example_graph();
        assert_eq!(max_flow_value(&g, s, t).unwrap(), FlowValue::Finite(2));
    }

    #[test]
    fn flow_merged_endpoints_is_infinite() {
        let g = Graph::from_edges(2, &[(0, 1)]);
        assert_eq!(max_flow_value(&g, 0, 0).unwrap(), FlowValue::Infinite);
    }

    #[test]
    fn disjoint_paths_single_edge() {
        let g = Graph::from_edges(2, &[(0, 1)]);
        let one = edge_disjoint_paths(&g, 0, 1, 1).unwrap().unwrap();
        assert_eq!(one[0].vertices, vec![0, 1]);
        assert!(edge_disjoint_paths(&g, 0, 1, 2).unwrap().is_none());
    }

    #[test]
    fn disjoint_paths_example_graph() {
        let (g, s, t) = example_graph();
        let paths = edge_disjoint_paths(&g, s, t, 2).unwrap().unwrap();
        let mut used = BTreeSet::new();
        for p in &paths {
            assert_eq!(*p.vertices.first().unwrap(), s);
            assert_eq!(*p.vertices.last().unwrap(), t);
            for &e in &p.edges {
                assert!(used.insert(e), "edge {e} reused");
            }
        }
    }

    #[test]
    fn minimal_cut_checks() {
        let g = Graph::from_edges(2, &[(0, 1)]);
        let c: BTreeSet<EdgeId> = [0].into_iter().collect();
        assert!(is_minimal_st_cut(&g, 0, 1, &c));

        let g = four_cycle();
        let only_sa: BTreeSet<EdgeId> = [0].into_iter().collect();
        assert!(!is_minimal_st_cut(&g, 0, 2, &only_sa));
        let both_s_edges: BTreeSet<EdgeId> = [0, 3].into_iter().collect();
        assert!(is_minimal_st_cut(&g, 0, 2, &both_s_edges));
    }

    #[test]
    fn enumerate_cuts_on_small_graphs() {
        let budget = WorkBudget::DEFAULT;
        let g = Graph::from_edges(2, &[(0, 1)]);
        let cuts = enumerate_minimal_cuts_upto(&g, 0, 1, 1, budget).unwrap();
        assert_eq!(cuts, vec![[0].into_iter().collect::<BTreeSet<_>>()]);

        let g = four_cycle();
        assert!(enumerate_minimal_cuts_upto(&g, 0, 2, 1, budget)
            .unwrap()
            .is_empty());
        let cuts = enumerate_minimal_cuts_upto(&g, 0, 2, 2, budget).unwrap();
        assert_eq!(cuts.len(), 4);
    }

    #[test]
    fn enumerate_separators_on_small_graphs() {
        let budget = WorkBudget::DEFAULT;
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        let seps = enumerate_minimal_separators_upto(&g, 0, 2, 1, budget).unwrap();
        assert_eq!(seps, vec![[1].into_iter().collect::<BTreeSet<_>>()]);

        let g = four_cycle();
        assert!(enumerate_minimal_separators_upto(&g, 0, 2, 1, budget)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn separators_of_subdivided_four_cycle() {
        // Brute force is the oracle here. Besides the four pairs of
        // subdivision vertices (one per original two-edge cut), the mixed
        // pairs through the original degree-2 vertices also separate, giving
        // 3 x 3 = 9 minimal separators in total.
        let g = four_cycle();
        let sub = crate::graph::subdivide_all_edges(&g);
        let seps =
            enumerate_minimal_separators_upto(&sub.graph, 0, 2, 2, WorkBudget::DEFAULT).unwrap();
        assert_eq!(seps.len(), 9);
        // The images of the four minimal cuts must be among them.
        let cuts = enumerate_minimal_cuts_upto(&g, 0, 2, 2, WorkBudget::DEFAULT).unwrap();
        assert_eq!(cuts.len(), 4);
        for cut in cuts {
            let image: BTreeSet<VertexId> = cut.iter().map(|&e| sub.midpoint[e]).collect();
            assert!(seps.contains(&image), "cut image {image:?} missing");
        }
    }

    #[test]
    fn budget_guard_fires() {
        let g = four_cycle();
        let err = enumerate_minimal_cuts_upto(&g, 0, 2, 4, WorkBudget(3));
        assert!(err.is_err());
    }

    #[test]
    fn disjoint_paths_verify_as_shared_free_routing() {
        let (g, s, t) = example_graph();
        let paths = edge_disjoint_paths(&g, s, t, 2).unwrap().unwrap();
        let routes: Vec<Vec<VertexId>> = paths.into_iter().map(|p| p.vertices).collect();
        let inst = crate::graph::Instance::new(g, s, t, 2, 0).unwrap();
        let out = crate::graph::verify_routing(&inst, &routes, crate::graph::CostMode::Count);
        assert!(out.valid);
        assert_eq!(out.shared_count, 0);
    }
}

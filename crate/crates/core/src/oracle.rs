//! Independent ground-truth solvers: subset enumeration over contracted
//! graphs, direct path-multiset enumeration, and a branch-and-bound search
//! tree. All three agree on the catalog; the dynamic program is tested
//! against them.

use std::collections::BTreeSet;

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{Error, Result, WorkBudget};
use crate::flow::{edge_disjoint_paths, max_flow_value_capped, minimum_cut};
use crate::graph::{
    contract_edges, verify_routing, CostMode, EdgeId, Graph, Instance, Routing, VertexId,
};

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub min_shared: u64,
    /// A certifying edge set: contracting it raises the flow to `p`.
    pub witness_edges: Option<BTreeSet<EdgeId>>,
}

fn contract_feasible(g: &Graph, s: VertexId, t: VertexId, p: usize, f: &BTreeSet<EdgeId>) -> bool {
    let c = contract_edges(g, f, true).expect("edge ids come from the graph");
    let (cs, ct) = (c.vertex_map[s], c.vertex_map[t]);
    if cs == ct {
        return true;
    }
    max_flow_value_capped(&c.graph, cs, ct, Some(p))
        .unwrap()
        .at_least(p)
}

fn set_cost(g: &Graph, f: &[EdgeId], mode: CostMode) -> u64 {
    f.iter().map(|&e| mode.edge_cost(g, e)).sum()
}

/// Smallest edge set (by count, or by total weight in weighted mode) whose
/// contraction allows `p` edge-disjoint routes; a merge of source and sink
/// counts as success. Subsets are enumerated by increasing size,
/// lexicographically within a size, and the first optimum in that order is
/// the witness.
pub fn contraction_oracle(
    inst: &Instance,
    mode: CostMode,
    budget: WorkBudget,
) -> Result<Option<OracleResult>> {
    let g = &inst.graph;
    let (s, t, p) = (inst.source, inst.sink, inst.num_routes);
    if !g.is_connected_between(s, t) {
        return Ok(None);
    }
    let m = g.num_edges();
    let ids: Vec<EdgeId> = (0..m).collect();
    let mut best: Option<(u64, Vec<EdgeId>)> = None;
    let mut examined: u128 = 0;
    for size in 0..=m {
        // Any candidate of this size costs at least `size` (weights are >= 1),
        // so a standing optimum below that ends the search.
        if let Some((bc, _)) = &best {
            if (size as u64) >= *bc {
                break;
            }
        }
        let mut level: u128 = 1;
        for i in 0..size {
            level = level.saturating_mul((m - i) as u128) / (i as u128 + 1);
        }
        examined = examined.saturating_add(level);
        budget.check(examined, "contraction oracle subset search")?;

        let combos: Vec<Vec<EdgeId>> = ids.iter().copied().combinations(size).collect();
        let level_best = combos
            .par_iter()
            .filter_map(|combo| {
                let f: BTreeSet<EdgeId> = combo.iter().copied().collect();
                if contract_feasible(g, s, t, p, &f) {
                    Some((set_cost(g, combo, mode), combo.clone()))
                } else {
                    None
                }
            })
            .min_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        if let Some((cost, combo)) = level_best {
            // Strict improvement only: on weight ties the smaller, earlier
            // enumerated set stays the witness.
            if best.as_ref().map_or(true, |(bc, _)| cost < *bc) {
                best = Some((cost, combo));
            }
        }
        if matches!(mode, CostMode::Count) {
            if best.is_some() {
                break; // counting mode: first feasible size is optimal
            }
        }
    }
    Ok(best.map(|(cost, combo)| OracleResult {
        min_shared: cost,
        witness_edges: Some(combo.into_iter().collect()),
    }))
}

/// Decision form of the contraction oracle: is there an edge set of cost at
/// most `bound` whose contraction allows `p` routes? Stops enumerating at
/// subsets of size `bound` (weights are at least 1).
pub fn contraction_oracle_decide(
    inst: &Instance,
    mode: CostMode,
    bound: u64,
    budget: WorkBudget,
) -> Result<bool> {
    let g = &inst.graph;
    let (s, t, p) = (inst.source, inst.sink, inst.num_routes);
    if !g.is_connected_between(s, t) {
        return Ok(false);
    }
    let m = g.num_edges();
    let ids: Vec<EdgeId> = (0..m).collect();
    let mut examined: u128 = 0;
    for size in 0..=(bound.min(m as u64) as usize) {
        let mut level: u128 = 1;
        for i in 0..size {
            level = level.saturating_mul((m - i) as u128) / (i as u128 + 1);
        }
        examined = examined.saturating_add(level);
        budget.check(examined, "contraction oracle decision")?;
        let combos: Vec<Vec<EdgeId>> = ids.iter().copied().combinations(size).collect();
        let found = combos.par_iter().any(|combo| {
            set_cost(g, combo, mode) <= bound && {
                let f: BTreeSet<EdgeId> = combo.iter().copied().collect();
                contract_feasible(g, s, t, p, &f)
            }
        });
        if found {
            return Ok(true);
        }
    }
    Ok(false)
}

/// All simple s-t paths (as sorted edge-id sets), capped by `budget`.
fn all_st_paths(
    g: &Graph,
    s: VertexId,
    t: VertexId,
    budget: WorkBudget,
) -> Result<Vec<Vec<EdgeId>>> {
    let mut out = Vec::new();
    let mut on_path = vec![false; g.num_vertices()];
    let mut edge_stack: Vec<EdgeId> = Vec::new();
    let mut steps: u128 = 0;
    fn rec(
        g: &Graph,
        v: VertexId,
        t: VertexId,
        on_path: &mut Vec<bool>,
        edge_stack: &mut Vec<EdgeId>,
        out: &mut Vec<Vec<EdgeId>>,
        steps: &mut u128,
        budget: WorkBudget,
    ) -> Result<()> {
        *steps += 1;
        budget.check(*steps, "path enumeration")?;
        if v == t {
            let mut path = edge_stack.clone();
            path.sort_unstable();
            out.push(path);
            return Ok(());
        }
        on_path[v] = true;
        for &(w, e) in g.neighbors(v) {
            if !on_path[w] {
                edge_stack.push(e);
                rec(g, w, t, on_path, edge_stack, out, steps, budget)?;
                edge_stack.pop();
            }
        }
        on_path[v] = false;
        Ok(())
    }
    rec(
        g,
        s,
        t,
        &mut on_path,
        &mut edge_stack,
        &mut out,
        &mut steps,
        budget,
    )?;
    out.sort_unstable();
    Ok(out)
}

/// Direct semantics: minimum over all multisets of `p` s-t paths of the
/// number (or weight) of edges used by two or more of them. Routes may
/// repeat. Only for tiny graphs.
pub fn path_enum_oracle(
    inst: &Instance,
    mode: CostMode,
    budget: WorkBudget,
) -> Result<Option<u64>> {
    let g = &inst.graph;
    let paths = all_st_paths(g, inst.source, inst.sink, budget)?;
    if paths.is_empty() {
        return Ok(None);
    }
    let p = inst.num_routes;
    let n_paths = paths.len();
    // Multisets of size p over n_paths choices.
    let mut multisets: u128 = 1;
    for i in 0..p {
        multisets = multisets.saturating_mul((n_paths + i) as u128) / (i as u128 + 1);
    }
    budget.check(multisets, "path multiset enumeration")?;
    let mut best: Option<u64> = None;
    let mut choice = vec![0usize; p];
    let mut uses = vec![0u32; g.num_edges()];
    loop {
        for u in uses.iter_mut() {
            *u = 0;
        }
        for &pi in &choice {
            for &e in &paths[pi] {
                uses[e] += 1;
            }
        }
        let cost: u64 = (0..g.num_edges())
            .filter(|&e| uses[e] >= 2)
            .map(|e| mode.edge_cost(g, e))
            .sum();
        if best.map_or(true, |b| cost < b) {
            best = Some(cost);
        }
        // Next non-decreasing index tuple.
        let mut q = p;
        loop {
            if q == 0 {
                return Ok(best);
            }
            q -= 1;
            if choice[q] + 1 < n_paths {
                let v = choice[q] + 1;
                for slot in choice.iter_mut().skip(q) {
                    *slot = v;
                }
                break;
            }
        }
    }
}

/// Search tree: answer "can `k` shared edges suffice" by branching, at every
/// infeasible graph, on which minimum-cut edge to share (contract). The
/// minimum cut has fewer than `p` edges, so the tree branches at most `p-1`
/// ways per level and has depth at most `k`.
fn search_tree_decide(g: &Graph, s: VertexId, t: VertexId, p: usize, k: u64) -> bool {
    if s == t {
        return true;
    }
    if max_flow_value_capped(g, s, t, Some(p)).unwrap().at_least(p) {
        return true;
    }
    if k == 0 {
        return false;
    }
    let cut = minimum_cut(g, s, t).unwrap();
    debug_assert!(cut.len() < p);
    for &e in &cut {
        let f: BTreeSet<EdgeId> = [e].into_iter().collect();
        let c = contract_edges(g, &f, true).unwrap();
        if search_tree_decide(&c.graph, c.vertex_map[s], c.vertex_map[t], p, k - 1) {
            return true;
        }
    }
    false
}

/// Optimization wrapper around the search tree: smallest `k` accepted.
/// Unweighted by construction (the branching counts shared edges).
pub fn search_tree_solver(inst: &Instance) -> Option<u64> {
    let g = &inst.graph;
    if !g.is_connected_between(inst.source, inst.sink) {
        return None;
    }
    // Contracting a spanning path merges source into sink, so the answer
    // never exceeds n-1.
    for k in 0..=(g.num_vertices() as u64) {
        if search_tree_decide(g, inst.source, inst.sink, inst.num_routes, k) {
            return Some(k);
        }
    }
    unreachable!("a connected instance has a finite optimum")
}

/// Builds a concrete routing from a certifying shared-edge set: contract the
/// set, decompose a flow into edge-disjoint paths, expand them back through
/// the contracted classes, and shortcut each walk to a simple path. The
/// result shares only edges of `f`.
pub fn routing_from_shared_set(
    g: &Graph,
    s: VertexId,
    t: VertexId,
    p: usize,
    f: &BTreeSet<EdgeId>,
) -> Result<Routing> {
    let c = contract_edges(g, f, true)?;
    let (cs, ct) = (c.vertex_map[s], c.vertex_map[t]);
    // Adjacency restricted to the contracted edges, for walking inside one
    // merged class.
    let blob_path = |from: VertexId, to: VertexId| -> Vec<VertexId> {
        if from == to {
            return vec![from];
        }
        let mut pred = vec![usize::MAX; g.num_vertices()];
        pred[from] = from;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(from);
        while let Some(v) = queue.pop_front() {
            if v == to {
                break;
            }
            for &(w, e) in g.neighbors(v) {
                if f.contains(&e) && pred[w] == usize::MAX {
                    pred[w] = v;
                    queue.push_back(w);
                }
            }
        }
        assert!(
            pred[to] != usize::MAX,
            "shared set must connect the merged class"
        );
        let mut path = vec![to];
        let mut v = to;
        while v != from {
            v = pred[v];
            path.push(v);
        }
        path.reverse();
        path
    };
    let shortcut = |walk: Vec<VertexId>| -> Vec<VertexId> {
        let mut pos: std::collections::BTreeMap<VertexId, usize> =
            std::collections::BTreeMap::new();
        let mut out: Vec<VertexId> = Vec::new();
        for v in walk {
            if let Some(&i) = pos.get(&v) {
                for dropped in out.drain(i + 1..) {
                    pos.remove(&dropped);
                }
            } else {
                pos.insert(v, out.len());
                out.push(v);
            }
        }
        out
    };
    let routes: Vec<Vec<VertexId>> = if cs == ct {
        // Source and sink merged: all routes follow one path inside the class.
        let path = blob_path(s, t);
        (0..p).map(|_| path.clone()).collect()
    } else {
        let paths = edge_disjoint_paths(&c.graph, cs, ct, p)?
            .ok_or_else(|| Error::Unsupported("shared set does not certify the flow".into()))?;
        paths
            .into_iter()
            .map(|cp| {
                let mut walk: Vec<VertexId> = vec![s];
                let mut cur = s;
                for &ce in &cp.edges {
                    let orig = c.origin[ce];
                    let (a, b) = g.endpoints(orig);
                    let (enter, exit) = if c.vertex_map[a] == c.vertex_map[cur] {
                        (a, b)
                    } else {
                        (b, a)
                    };
                    let hop = blob_path(cur, enter);
                    walk.extend_from_slice(&hop[1..]);
                    walk.push(exit);
                    cur = exit;
                }
                let tail = blob_path(cur, t);
                walk.extend_from_slice(&tail[1..]);
                shortcut(walk)
            })
            .collect()
    };
    Ok(Routing::from_routes(g, routes))
}

/// Contraction oracle plus a verified witness routing.
pub fn contraction_oracle_with_routing(
    inst: &Instance,
    mode: CostMode,
    budget: WorkBudget,
) -> Result<Option<(OracleResult, Routing)>> {
    let Some(res) = contraction_oracle(inst, mode, budget)? else {
        return Ok(None);
    };
    let f = res.witness_edges.clone().unwrap();
    let routing =
        routing_from_shared_set(&inst.graph, inst.source, inst.sink, inst.num_routes, &f)?;
    let check = verify_routing(inst, &routing.routes, mode);
    assert!(check.valid);
    assert_eq!(
        check.shared_count, res.min_shared,
        "witness routing must hit the optimum"
    );
    Ok(Some((res, routing)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_cycle_inst(p: usize) -> Instance {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        Instance::new(g, 0, 2, p, 0).unwrap()
    }

    fn budget() -> WorkBudget {
        WorkBudget::DEFAULT
    }

    #[test]
    fn contraction_oracle_examples() {
        let g = Graph::from_edges(2, &[(0, 1)]);
        let inst = Instance::new(g, 0, 1, 2, 0).unwrap();
        let r = contraction_oracle(&inst, CostMode::Count, budget())
            .unwrap()
            .unwrap();
        assert_eq!(r.min_shared, 1);

        // Flow already covers p: empty witness.
        let inst = four_cycle_inst(2);
        let r = contraction_oracle(&inst, CostMode::Count, budget())
            .unwrap()
            .unwrap();
        assert_eq!(r.min_shared, 0);
        assert_eq!(r.witness_edges, Some(BTreeSet::new()));

        let inst = four_cycle_inst(3);
        let r = contraction_oracle(&inst, CostMode::Count, budget())
            .unwrap()
            .unwrap();
        assert_eq!(r.min_shared, 2);
        // Lexicographically first witness: the two edges of the s-a-t side.
        assert_eq!(r.witness_edges, Some([0, 1].into_iter().collect()));
    }

    #[test]
    fn path_enum_examples() {
        let g = Graph::from_edges(2, &[(0, 1)]);
        let inst = Instance::new(g, 0, 1, 2, 0).unwrap();
        assert_eq!(
            path_enum_oracle(&inst, CostMode::Count, budget()).unwrap(),
            Some(1)
        );
        assert_eq!(
            path_enum_oracle(&four_cycle_inst(2), CostMode::Count, budget()).unwrap(),
            Some(0)
        );
        assert_eq!(
            path_enum_oracle(&four_cycle_inst(3), CostMode::Count, budget()).unwrap(),
            Some(2)
        );
    }

    #[test]
    fn search_tree_examples() {
        let g = Graph::from_edges(2, &[(0, 1)]);
        let inst = Instance::new(g, 0, 1, 2, 0).unwrap();
        assert_eq!(search_tree_solver(&inst), Some(1));
        assert_eq!(search_tree_solver(&four_cycle_inst(2)), Some(0));
        assert_eq!(search_tree_solver(&four_cycle_inst(3)), Some(2));
    }

    #[test]
    fn oracles_agree_on_disconnected() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]);
        let inst = Instance::new(g, 0, 3, 2, 0).unwrap();
        assert!(contraction_oracle(&inst, CostMode::Count, budget())
            .unwrap()
            .is_none());
        assert_eq!(
            path_enum_oracle(&inst, CostMode::Count, budget()).unwrap(),
            None
        );
        assert_eq!(search_tree_solver(&inst), None);
    }

    #[test]
    fn witness_routing_matches_optimum() {
        let inst = four_cycle_inst(3);
        let (res, routing) = contraction_oracle_with_routing(&inst, CostMode::Count, budget())
            .unwrap()
            .unwrap();
        assert_eq!(res.min_shared, 2);
        let out = verify_routing(&inst, &routing.routes, CostMode::Count);
        assert!(out.valid);
        assert_eq!(out.shared_count, 2);
    }

    #[test]
    fn weighted_contraction_oracle_prefers_cheap_edges() {
        let g = Graph::from_weighted_edges(4, &[(0, 1, 5), (1, 2, 5), (2, 3, 1), (3, 0, 1)]);
        let inst = Instance::new(g, 0, 2, 3, 0).unwrap();
        let r = contraction_oracle(&inst, CostMode::Weighted, budget())
            .unwrap()
            .unwrap();
        assert_eq!(r.min_shared, 2);
        assert_eq!(r.witness_edges, Some([2, 3].into_iter().collect()));
    }

    #[test]
    fn budget_guard_reports_exhaustion() {
        let inst = four_cycle_inst(3);
        let err = contraction_oracle(&inst, CostMode::Count, WorkBudget(2));
        assert!(matches!(err, Err(Error::WorkBoundExceeded { .. })));
    }
}

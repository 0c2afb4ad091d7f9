//! The route-count pipeline: subdivide every edge, keep only vertices that
//! sit on small minimal separators (replacing outside connections by
//! parallel length-2 copy paths), undo the surviving subdivisions, and hand
//! the shrunken graph to the dynamic program. Small minimal cuts, and with
//! them the optimum, survive the trip in both directions.

use std::collections::{BTreeMap, BTreeSet};

use crate::dp::{solve_on, DpSolution, SolveLimits};
use crate::error::{Result, WorkBudget};
use crate::flow::enumerate_minimal_separators_upto;
use crate::graph::{
    contract_edges, subdivide_all_edges, verify_routing, CostMode, EdgeId, Graph, GraphBuilder,
    Instance, Routing, VertexId,
};
use crate::nice::make_nice_with_edges;
use crate::oracle::routing_from_shared_set;
use crate::treedecomp::heuristic_td;

/// One parallel family of length-2 connections added by the torso step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopyPathRecord {
    pub endpoints: (VertexId, VertexId),
    pub multiplicity: usize,
}

/// Everything the reduction produced, for inspection and witness lifting.
#[derive(Debug, Clone)]
pub struct PipelineTrace {
    /// The input graph with every edge subdivided.
    pub h_graph: Graph,
    /// The torso of the subdivided graph on the kept vertices.
    pub reduced_graph: Graph,
    /// The final graph handed to the solver.
    pub final_graph: Graph,
    /// Subdivision vertices that survived into the torso, by original edge id.
    pub preserved_subdivision_vertices: BTreeSet<VertexId>,
    /// Original edge id -> edge id in the final graph.
    pub edge_correspondence: BTreeMap<EdgeId, EdgeId>,
    /// Original vertex id -> vertex id in the final graph (kept vertices).
    pub vertex_correspondence: BTreeMap<VertexId, VertexId>,
    pub copy_path_records: Vec<CopyPathRecord>,
    pub final_source: VertexId,
    pub final_sink: VertexId,
}

/// Induced subgraph on `keep` plus the terminals, with `extra_paths`
/// parallel length-2 paths added for every non-adjacent pair joined by a
/// path through the discarded vertices.
///
/// Returns the new graph, the old->new vertex map for kept vertices, and
/// the copy-path families (in new ids).
pub fn torso(
    g: &Graph,
    keep: &BTreeSet<VertexId>,
    terminals: (VertexId, VertexId),
    extra_paths: usize,
) -> Result<(Graph, BTreeMap<VertexId, VertexId>, Vec<CopyPathRecord>)> {
    g.check_vertex(terminals.0)?;
    g.check_vertex(terminals.1)?;
    let mut kept: BTreeSet<VertexId> = keep.clone();
    kept.insert(terminals.0);
    kept.insert(terminals.1);
    for &v in &kept {
        g.check_vertex(v)?;
    }
    let mut vmap = BTreeMap::new();
    let mut b = GraphBuilder::new(0);
    for &v in &kept {
        let nv = b.add_vertex();
        if let Some(lab) = g.label(v) {
            b.set_label(nv, lab.to_string());
        }
        vmap.insert(v, nv);
    }
    for (_, u, v, w) in g.edges() {
        if kept.contains(&u) && kept.contains(&v) {
            b.add_weighted_edge(vmap[&u], vmap[&v], w);
        }
    }
    // Pairs of kept vertices joined through a discarded component.
    let mut outside_pairs: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    let mut seen = vec![false; g.num_vertices()];
    for start in 0..g.num_vertices() {
        if kept.contains(&start) || seen[start] {
            continue;
        }
        let mut comp_attach: BTreeSet<VertexId> = BTreeSet::new();
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &(w, _) in g.neighbors(v) {
                if kept.contains(&w) {
                    comp_attach.insert(w);
                } else if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        let attach: Vec<VertexId> = comp_attach.into_iter().collect();
        for i in 0..attach.len() {
            for j in i + 1..attach.len() {
                outside_pairs.insert((attach[i], attach[j]));
            }
        }
    }
    let mut records = Vec::new();
    for (u, v) in outside_pairs {
        if g.edge_between(u, v).is_some() {
            continue; // already adjacent; the induced edge is kept as is
        }
        let (nu, nv) = (vmap[&u], vmap[&v]);
        for i in 0..extra_paths + 1 {
            let x = b.add_labeled_vertex(format!("copy:{u}-{v}:{i}"));
            b.add_edge(nu, x);
            b.add_edge(x, nv);
        }
        records.push(CopyPathRecord {
            endpoints: (nu, nv),
            multiplicity: extra_paths + 1,
        });
    }
    Ok((b.build(), vmap, records))
}

/// Runs the three reduction steps for an instance asking for `p` routes.
pub fn treewidth_reduce(
    g: &Graph,
    s: VertexId,
    t: VertexId,
    p: usize,
    budget: WorkBudget,
) -> Result<PipelineTrace> {
    assert!(p >= 1);
    let sub = subdivide_all_edges(g);
    let h = sub.graph.clone();
    // Every vertex on a minimal separator of size below p stays.
    let seps = enumerate_minimal_separators_upto(&h, s, t, p.saturating_sub(1), budget)?;
    let mut keep: BTreeSet<VertexId> = BTreeSet::new();
    for sep in &seps {
        keep.extend(sep.iter().copied());
    }
    let (h_star, vmap_h, records) = torso(&h, &keep, (s, t), p.saturating_sub(1))?;
    // Subdivision vertices that survived, with their original edge ids.
    let preserved: BTreeMap<EdgeId, VertexId> = sub
        .midpoint
        .iter()
        .enumerate()
        .filter(|&(_, x)| vmap_h.contains_key(x))
        .map(|(e, &x)| (e, vmap_h[&x]))
        .collect();
    // Undo each surviving subdivision: contract the incident edge toward the
    // lexicographically smaller original endpoint.
    let mut to_contract: BTreeSet<EdgeId> = BTreeSet::new();
    for (&e, &x_star) in &preserved {
        let (a, bb) = g.endpoints(e);
        let toward = vmap_h[&a.min(bb)];
        let edge = h_star
            .edge_between(x_star, toward)
            .expect("surviving subdivision vertices keep both incident edges");
        to_contract.insert(edge);
    }
    let contraction = contract_edges(&h_star, &to_contract, true)?;
    let final_graph = contraction.graph.clone();

    let mut vertex_correspondence = BTreeMap::new();
    for v in 0..g.num_vertices() {
        if let Some(&hv) = vmap_h.get(&v) {
            vertex_correspondence.insert(v, contraction.vertex_map[hv]);
        }
    }
    // A surviving subdivision vertex's uncontracted half-edge becomes the
    // corresponding original edge.
    let mut edge_correspondence = BTreeMap::new();
    for (&e, &x_star) in &preserved {
        let (a, bb) = g.endpoints(e);
        let away = vmap_h[&a.max(bb)];
        let half = h_star.edge_between(x_star, away).expect("other half-edge");
        let ne = contraction.edge_map[half].expect("uncontracted half survives");
        edge_correspondence.insert(e, ne);
        // Restore the original weight: both halves carried it.
        debug_assert_eq!(final_graph.weight(ne), g.weight(e));
    }
    let copy_path_records = records
        .into_iter()
        .map(|r| CopyPathRecord {
            endpoints: (
                contraction.vertex_map[r.endpoints.0],
                contraction.vertex_map[r.endpoints.1],
            ),
            multiplicity: r.multiplicity,
        })
        .collect();
    let final_source = contraction.vertex_map[vmap_h[&s]];
    let final_sink = contraction.vertex_map[vmap_h[&t]];
    Ok(PipelineTrace {
        h_graph: h,
        reduced_graph: h_star,
        final_graph,
        preserved_subdivision_vertices: preserved.values().copied().collect(),
        edge_correspondence,
        vertex_correspondence,
        copy_path_records,
        final_source,
        final_sink,
    })
}

#[derive(Debug, Clone)]
pub struct FptSolution {
    pub min_shared: u64,
    pub routing: Routing,
    pub trace: PipelineTrace,
    pub reduced_width: usize,
    pub dp: DpSolution,
}

/// Full pipeline: reduce, solve on the reduced graph, lift the witness back.
///
/// The optimum is unchanged by the reduction; the witness is rebuilt on the
/// original graph from the shared-edge set (no shared edge of an optimal
/// reduced routing lies on a copy path, so the set maps back one-to-one).
pub fn solve_fpt(
    inst: &Instance,
    mode: CostMode,
    budget: WorkBudget,
    limits: &SolveLimits,
) -> Result<Option<FptSolution>> {
    let g = &inst.graph;
    let trace = treewidth_reduce(g, inst.source, inst.sink, inst.num_routes, budget)?;
    let reduced = Instance::new(
        trace.final_graph.clone(),
        trace.final_source,
        trace.final_sink,
        inst.num_routes,
        inst.budget,
    )?;
    let td = heuristic_td(&reduced.graph);
    let reduced_width = td.width();
    let ntd = make_nice_with_edges(&reduced.graph, &td, reduced.source, reduced.sink)?;
    let Some(dp) = solve_on(&reduced, &ntd, mode, limits)? else {
        return Ok(None);
    };
    // Map the shared set back through the one-to-one edge correspondence.
    let reverse: BTreeMap<EdgeId, EdgeId> = trace
        .edge_correspondence
        .iter()
        .map(|(&e, &ne)| (ne, e))
        .collect();
    let mut shared_original: BTreeSet<EdgeId> = BTreeSet::new();
    for &ne in &dp.routing.shared_edges {
        match reverse.get(&ne) {
            Some(&e) => {
                shared_original.insert(e);
            }
            None => {
                unreachable!("optimal reduced routings never share copy-path edges")
            }
        }
    }
    let routing =
        routing_from_shared_set(g, inst.source, inst.sink, inst.num_routes, &shared_original)?;
    let check = verify_routing(inst, &routing.routes, mode);
    assert!(check.valid);
    assert_eq!(
        check.shared_count, dp.min_shared,
        "lifted witness must stay optimal"
    );
    Ok(Some(FptSolution {
        min_shared: dp.min_shared,
        routing,
        trace,
        reduced_width,
        dp,
    }))
}

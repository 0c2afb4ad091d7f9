//! The promise variant and the chain composition: adding a budget-length
//! escape path turns any instance into one that is solvable with one extra
//! shared edge, and gluing such instances sink-to-source produces an
//! instance that is a yes exactly when some component is.

use crate::error::{Error, Result};
use crate::graph::{verify_routing, CostMode, GraphBuilder, Instance, Routing, VertexId};

/// An instance carrying the promise that one more shared edge always
/// suffices, with the certifying routing attached.
#[derive(Debug, Clone)]
pub struct PromiseInstance {
    pub instance: Instance,
    /// A routing with exactly `budget + 1` shared edges.
    pub promise_routing: Routing,
}

/// Adds a path of `k+1` edges between source and sink and asks for one more
/// route: the new instance has a routing sharing `k+1` edges (everything on
/// the new path), and is a yes for budget `k` exactly when the original is.
/// Requires `k > 0`.
pub fn mse_to_amse(inst: &Instance) -> Result<PromiseInstance> {
    let k = inst.budget;
    if k == 0 {
        return Err(Error::Unsupported(
            "promise construction needs a positive budget".into(),
        ));
    }
    let g = &inst.graph;
    let mut b = GraphBuilder::new(g.num_vertices());
    for (v, lab) in g.labels() {
        b.set_label(*v, lab.clone());
    }
    for (_, u, v, w) in g.edges() {
        b.add_weighted_edge(u, v, w);
    }
    let mut escape = vec![inst.source];
    let mut prev = inst.source;
    for i in 0..k {
        let x = b.add_labeled_vertex(format!("escape:{i}"));
        b.add_edge(prev, x);
        escape.push(x);
        prev = x;
    }
    b.add_edge(prev, inst.sink);
    escape.push(inst.sink);
    let graph = b.build();
    let p = inst.num_routes + 1;
    let routes: Vec<Vec<VertexId>> = (0..p).map(|_| escape.clone()).collect();
    let instance = Instance::new(graph, inst.source, inst.sink, p, k)?;
    let check = verify_routing(&instance, &routes, CostMode::Count);
    assert!(check.valid);
    assert_eq!(
        check.shared_count,
        k + 1,
        "promise routing shares the whole escape path"
    );
    let promise_routing = Routing::from_routes(&instance.graph, routes);
    Ok(PromiseInstance {
        instance,
        promise_routing,
    })
}

/// Glues the instances in a chain, identifying each sink with the next
/// source. All instances must ask for the same routes and budget; the result
/// asks for the same routes with budget `l*(k+1) - 1`.
pub fn or_cross_compose(parts: &[PromiseInstance]) -> Result<Instance> {
    if parts.is_empty() {
        return Err(Error::MismatchedInstances(
            "need at least one instance".into(),
        ));
    }
    let p = parts[0].instance.num_routes;
    let k = parts[0].instance.budget;
    for q in parts {
        if q.instance.num_routes != p || q.instance.budget != k {
            return Err(Error::MismatchedInstances(format!(
                "expected (p={p}, k={k}), found (p={}, k={})",
                q.instance.num_routes, q.instance.budget
            )));
        }
    }
    let mut b = GraphBuilder::new(0);
    let mut glue: Option<VertexId> = None; // previous sink, shared with next source
    let mut first_source = None;
    let mut last_sink = None;
    for part in parts {
        let g = &part.instance.graph;
        // Map this component's vertices into the composite; the source reuses
        // the previous sink's vertex when gluing.
        let mut map = vec![usize::MAX; g.num_vertices()];
        for v in 0..g.num_vertices() {
            if v == part.instance.source {
                map[v] = match glue {
                    Some(shared) => shared,
                    None => b.add_vertex(),
                };
            } else {
                map[v] = b.add_vertex();
            }
            if let Some(lab) = g.label(v) {
                b.set_label(map[v], lab.to_string());
            }
        }
        for (_, u, v, w) in g.edges() {
            b.add_weighted_edge(map[u], map[v], w);
        }
        if first_source.is_none() {
            first_source = Some(map[part.instance.source]);
        }
        glue = Some(map[part.instance.sink]);
        last_sink = Some(map[part.instance.sink]);
    }
    let l = parts.len() as u64;
    Instance::new(
        b.build(),
        first_source.unwrap(),
        last_sink.unwrap(),
        p,
        l * (k + 1) - 1,
    )
}
